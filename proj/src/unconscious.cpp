#include "psychot/unconscious.hpp"

#include <algorithm>
#include <string>

#include "psychot/affect.hpp"

namespace psychot {

void validate(const UnconsciousConfig& cfg) {
  if (!(cfg.leak_rate >= 0.0 && cfg.leak_rate <= 1.0))
    throw ValidationError("/leak_rate", "leak rate must lie in [0, 1]");
}

double uniform01(std::mt19937_64& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void UnconsciousStore::repress(IdeaId idea_id, const MentalPoint& point, Tick tick) {
  if (std::any_of(wishes_.begin(), wishes_.end(), [&](const RepressedWish& w) { return w.idea_id == idea_id; }))
    throw DuplicateWish("idea " + std::to_string(idea_id) + " is already repressed");
  wishes_.push_back(RepressedWish{idea_id, point, tick, 0});
  hidden_db_.insert(point);
}

std::vector<RepressedWish> UnconsciousStore::select_leaks(double leak_rate, std::mt19937_64& rng) {
  std::vector<RepressedWish> selected;
  if (leak_rate <= 0.0) return selected;
  for (auto& w : wishes_) {
    if (uniform01(rng) < leak_rate) {
      ++w.leak_count;
      selected.push_back(w);
    }
  }
  return selected;
}

double unconscious_interdiction(const MetricSpec& space, const MentalPoint& x, const Database& hidden_db) {
  return affinity_measure(space, x, hidden_db);
}

Resistance resistance_check(const MetricSpec& space, const MentalPoint& x, const Database& hidden_db,
                            const ProcessorSpec& proc) {
  if (!proc.blocking_threshold) return Resistance::Pass;
  return unconscious_interdiction(space, x, hidden_db) > *proc.blocking_threshold ? Resistance::Blocked
                                                                                  : Resistance::Pass;
}

} // namespace psychot
