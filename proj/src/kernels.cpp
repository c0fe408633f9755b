#include "psychot/kernels.hpp"

#include <cstddef>
#include <string>

#include "psychot/affect.hpp"

namespace psychot::kernels {

namespace {

void check_sweepable(const MetricSpec& space) {
  if (space.cardinality() > kMaxSweepPoints)
    throw ValidationError("", "space has " + std::to_string(space.cardinality()) +
                                  " points; whole-space sweeps are limited to " + std::to_string(kMaxSweepPoints));
}

} // namespace

OrbitRow orbit_row(const MetricSpec& space, const ProcessorSpec& proc, std::uint64_t start) {
  const auto outcome = iterate(space, proc, space.decode(start));
  if (const auto* a = std::get_if<Attractor>(&outcome))
    return OrbitRow{start, OrbitKind::Attractor, space.encode(a->point), a->steps};
  if (const auto* c = std::get_if<Cycle>(&outcome))
    return OrbitRow{start, OrbitKind::Cycle, space.encode(c->points.front()), c->period};
  return OrbitRow{start, OrbitKind::Exhausted, space.encode(std::get<Exhausted>(outcome).last_point), proc.max_steps};
}

std::vector<OrbitRow> orbit_table_serial(const MetricSpec& space, const ProcessorSpec& proc) {
  check_sweepable(space);
  std::vector<OrbitRow> table;
  table.reserve(space.cardinality());
  for (std::uint64_t v = 0; v < space.cardinality(); ++v) table.push_back(orbit_row(space, proc, v));
  return table;
}

std::vector<OrbitRow> orbit_table_parallel(const MetricSpec& space, const ProcessorSpec& proc) {
  check_sweepable(space);
  const auto n = static_cast<std::ptrdiff_t>(space.cardinality());
  std::vector<OrbitRow> table(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t v = 0; v < n; ++v)
    table[static_cast<std::size_t>(v)] = orbit_row(space, proc, static_cast<std::uint64_t>(v));
  return table;
}

std::map<std::uint64_t, std::vector<std::uint64_t>> basins(const std::vector<OrbitRow>& table) {
  std::map<std::uint64_t, std::vector<std::uint64_t>> out;
  for (const auto& row : table)
    if (row.kind == OrbitKind::Attractor) out[row.point].push_back(row.start);
  return out;
}

std::vector<double> measure_table_serial(const MetricSpec& space, const Database& db) {
  check_sweepable(space);
  std::vector<double> out;
  out.reserve(space.cardinality());
  for (std::uint64_t v = 0; v < space.cardinality(); ++v) out.push_back(affinity_measure(space, space.decode(v), db));
  return out;
}

std::vector<double> measure_table_parallel(const MetricSpec& space, const Database& db) {
  check_sweepable(space);
  const auto n = static_cast<std::ptrdiff_t>(space.cardinality());
  std::vector<double> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t v = 0; v < n; ++v)
    out[static_cast<std::size_t>(v)] = affinity_measure(space, space.decode(static_cast<std::uint64_t>(v)), db);
  return out;
}

} // namespace psychot::kernels
