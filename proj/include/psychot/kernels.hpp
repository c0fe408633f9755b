#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "psychot/dynamics.hpp"
#include "psychot/mental_space.hpp"

// Whole-space sweeps. Each kernel has a serial reference and an OpenMP
// version that must produce identical output; tests compare the two.
namespace psychot::kernels {

// Largest space the sweeps accept.
inline constexpr std::uint64_t kMaxSweepPoints = std::uint64_t{1} << 22;

enum class OrbitKind : std::uint8_t { Attractor, Cycle, Exhausted };

struct OrbitRow {
  std::uint64_t start = 0;
  OrbitKind kind = OrbitKind::Attractor;
  std::uint64_t point = 0;  // attractor, first cycle point, or last point
  std::uint64_t length = 0; // steps to the attractor, or cycle period
  friend bool operator==(const OrbitRow&, const OrbitRow&) = default;
};

OrbitRow orbit_row(const MetricSpec& space, const ProcessorSpec& proc, std::uint64_t start);

std::vector<OrbitRow> orbit_table_serial(const MetricSpec& space, const ProcessorSpec& proc);
std::vector<OrbitRow> orbit_table_parallel(const MetricSpec& space, const ProcessorSpec& proc);

// Attractor -> starting points whose orbit ends there (ascending).
std::map<std::uint64_t, std::vector<std::uint64_t>> basins(const std::vector<OrbitRow>& table);

// 1/(d+1) of every point of the space against one database, indexed by the
// encoded point.
std::vector<double> measure_table_serial(const MetricSpec& space, const Database& db);
std::vector<double> measure_table_parallel(const MetricSpec& space, const Database& db);

} // namespace psychot::kernels
