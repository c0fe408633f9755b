#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "psychot/mental_space.hpp"

namespace psychot {

// v -> v^n mod p^m
struct MonomialMap {
  std::uint32_t n = 1;
  friend bool operator==(const MonomialMap&, const MonomialMap&) = default;
};

// v -> (a*v + b) mod p^m
struct AffineMap {
  std::uint64_t a = 1;
  std::uint64_t b = 0;
  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

struct RewriteRule {
  MentalPoint from; // a digit prefix, shorter than or equal to m
  MentalPoint to;   // same length as `from`
  friend bool operator==(const RewriteRule&, const RewriteRule&) = default;
};

// Replaces the longest matching prefix; identity when nothing matches.
struct PrefixRewriteMap {
  std::vector<RewriteRule> rules;
  friend bool operator==(const PrefixRewriteMap&, const PrefixRewriteMap&) = default;
};

using ThinkingMap = std::variant<MonomialMap, AffineMap, PrefixRewriteMap>;

enum class OutputTarget { SCC, UC, Internal };

std::string_view to_string(OutputTarget t) noexcept;
OutputTarget output_target_from_string(std::string_view s);

struct ProcessorSpec {
  std::string id;
  ThinkingMap map = MonomialMap{};
  OutputTarget output_target = OutputTarget::SCC;
  // Unconscious-interdiction cutoff; nullopt disables blocking.
  std::optional<double> blocking_threshold;
  std::uint64_t max_steps = 1;

  friend bool operator==(const ProcessorSpec&, const ProcessorSpec&) = default;
};

// Throws ValidationError (paths relative to the processor) on a broken processor.
void validate(const MetricSpec& space, const ProcessorSpec& proc);

// Smallest step budget that makes Exhausted unreachable, clamped to 2^20.
std::uint64_t default_max_steps(const MetricSpec& space) noexcept;

struct Attractor {
  MentalPoint point;
  std::uint64_t steps = 0; // applications needed to first reach the point
};

struct Cycle {
  std::vector<MentalPoint> points; // in orbit order, starting where the orbit entered
  std::uint64_t period = 0;
};

struct Exhausted {
  MentalPoint last_point;
};

using IterationOutcome = std::variant<Attractor, Cycle, Exhausted>;

MentalPoint apply(const MetricSpec& space, const ProcessorSpec& proc, const MentalPoint& x);

// Integer form of apply for encoded points; the orbit kernels run on this.
std::uint64_t apply_encoded(const MetricSpec& space, const ThinkingMap& map, std::uint64_t v);

// Iterates until the orbit revisits a point (or max_steps applications pass).
IterationOutcome iterate(const MetricSpec& space, const ProcessorSpec& proc, const MentalPoint& x0);

} // namespace psychot
