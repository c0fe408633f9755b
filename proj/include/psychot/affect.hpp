#pragma once

#include <optional>
#include <string>
#include <variant>

#include "psychot/mental_space.hpp"

namespace psychot {

// Weights of the consistency functional a*I + b*D. Whole-agent constants.
struct EmotionProfile {
  double a = 1.0;
  double b = -1.0;

  static EmotionProfile normal() { return {1.0, -1.0}; }
  static EmotionProfile risky(double a = 5.0) { return {a, -1.0}; }
  static EmotionProfile adrenaline() { return {1.0, 1.0}; }

  friend bool operator==(const EmotionProfile&, const EmotionProfile&) = default;
};

// Named preset ("normal", "risky", "adrenaline") or throws ValidationError.
EmotionProfile profile_preset(std::string_view name);

struct Thresholds {
  double realization = 0.0;
  double preserving = 1.0;
  // Doubt needs both measures strictly above these; values above 1 disable it.
  double max_interest = 2.0;
  double max_interdiction = 2.0;

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

void validate(const MetricSpec& space, const Thresholds& th);

struct Discard {
  friend bool operator==(const Discard&, const Discard&) = default;
};
struct Queue {
  double score = 0.0;
  bool pinned = false;
  friend bool operator==(const Queue&, const Queue&) = default;
};
struct Doubtful {
  friend bool operator==(const Doubtful&, const Doubtful&) = default;
};

using Disposition = std::variant<Discard, Queue, Doubtful>;

// 1/(distance_to_set + 1); lies in [k, 1].
double affinity_measure(const MetricSpec& space, const MentalPoint& x, const Database& db);

inline double interest_measure(const MetricSpec& space, const MentalPoint& x, const Database& interest_db) {
  return affinity_measure(space, x, interest_db);
}

inline double interdiction_measure(const MetricSpec& space, const MentalPoint& x,
                                   const Database& interdiction_db) {
  return affinity_measure(space, x, interdiction_db);
}

inline double consistency(double interest, double interdiction, const EmotionProfile& profile) {
  return profile.a * interest + profile.b * interdiction;
}

class UnsupportedLevel : public Error {
public:
  using Error::Error;
};

// Analyzer decision for model levels 2-4. At level 2 the interdiction
// argument is ignored and the score is bare interest. Level 4 tests the
// domain of doubts before any score comparison.
Disposition classify(double interest, double interdiction, const EmotionProfile& profile,
                     const Thresholds& th, int model_level);

// Level 2: interest. Levels 3-4: consistency. Level 1 has no defined value.
double pleasure_reality(double interest, double interdiction, const EmotionProfile& profile,
                        int model_level);

} // namespace psychot
