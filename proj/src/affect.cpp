#include "psychot/affect.hpp"

namespace psychot {

EmotionProfile profile_preset(std::string_view name) {
  if (name == "normal") return EmotionProfile::normal();
  if (name == "risky") return EmotionProfile::risky();
  if (name == "adrenaline") return EmotionProfile::adrenaline();
  throw ValidationError("", "unknown profile preset '" + std::string(name) + "'");
}

void validate(const MetricSpec& space, const Thresholds& th) {
  if (!(th.preserving > th.realization))
    throw ValidationError("/preserving",
                          "Thresholds invariant violated: preserving must exceed realization");
  if (!(th.max_interest >= space.min_measure()))
    throw ValidationError("/max_interest", "max_interest must be >= k");
  if (!(th.max_interdiction >= space.min_measure()))
    throw ValidationError("/max_interdiction", "max_interdiction must be >= k");
}

double affinity_measure(const MetricSpec& space, const MentalPoint& x, const Database& db) {
  return 1.0 / (distance_to_set(space, x, db) + 1.0);
}

Disposition classify(double interest, double interdiction, const EmotionProfile& profile,
                     const Thresholds& th, int model_level) {
  if (model_level < 2 || model_level > 4)
    throw UnsupportedLevel("classify requires model level 2, 3 or 4, got " + std::to_string(model_level));
  if (model_level == 4 && interest > th.max_interest && interdiction > th.max_interdiction)
    return Doubtful{};
  const double score = model_level == 2 ? interest : consistency(interest, interdiction, profile);
  if (score < th.realization) return Discard{};
  return Queue{score, score >= th.preserving};
}

double pleasure_reality(double interest, double interdiction, const EmotionProfile& profile,
                        int model_level) {
  switch (model_level) {
  case 2: return interest;
  case 3:
  case 4: return consistency(interest, interdiction, profile);
  default:
    throw UnsupportedLevel("pleasure-reality is undefined at model level " + std::to_string(model_level));
  }
}

} // namespace psychot
