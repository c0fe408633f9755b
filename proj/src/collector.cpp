#include "psychot/collector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psychot/error.hpp"

namespace psychot {

bool queue_before(const QueuedIdea& x, const QueuedIdea& y) noexcept {
  if (x.score != y.score) return x.score > y.score;
  if (x.enqueued_tick != y.enqueued_tick) return x.enqueued_tick < y.enqueued_tick;
  return x.idea_id < y.idea_id;
}

void validate(const CollectorConfig& cfg) {
  if (cfg.capacity < 1) throw ValidationError("/capacity", "collector capacity must be >= 1");
  if (!(cfg.half_life_ticks > 0.0) || !std::isfinite(cfg.half_life_ticks))
    throw ValidationError("/half_life_ticks", "half-life must be a positive finite number");
}

std::optional<QueuedIdea> Collector::enqueue(const QueuedIdea& item) {
  auto pos = std::upper_bound(items_.begin(), items_.end(), item, queue_before);
  items_.insert(pos, item);
  if (items_.size() <= cfg_.capacity) return std::nullopt;

  auto victim = std::find_if(items_.rbegin(), items_.rend(), [](const QueuedIdea& q) { return !q.pinned; });
  if (victim == items_.rend()) {
    items_.erase(std::find(items_.begin(), items_.end(), item));
    throw CollectorFull("collector holds " + std::to_string(cfg_.capacity) +
                        " pinned ideas; cannot admit idea " + std::to_string(item.idea_id));
  }
  QueuedIdea evicted = *victim;
  items_.erase(std::next(victim).base());
  return evicted;
}

std::vector<QueuedIdea> Collector::decay(double dt, double realization_threshold) {
  std::vector<QueuedIdea> purged;
  if (dt <= 0.0 || items_.empty()) return purged;
  const double factor = std::exp2(-dt / cfg_.half_life_ticks);
  for (auto& q : items_)
    if (!q.pinned) q.score *= factor;
  auto keep = std::stable_partition(items_.begin(), items_.end(), [&](const QueuedIdea& q) {
    return q.pinned || q.score >= realization_threshold;
  });
  purged.assign(keep, items_.end());
  items_.erase(keep, items_.end());
  std::stable_sort(items_.begin(), items_.end(), queue_before);
  return purged;
}

std::vector<QueuedIdea> Collector::pop_for_realization() {
  const auto n = std::min<std::size_t>(items_.size(), cfg_.realizations_per_tick);
  std::vector<QueuedIdea> out(items_.begin(), items_.begin() + static_cast<std::ptrdiff_t>(n));
  items_.erase(items_.begin(), items_.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

} // namespace psychot
