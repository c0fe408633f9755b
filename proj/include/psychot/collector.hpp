#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "psychot/error.hpp"

namespace psychot {

using IdeaId = std::uint64_t;
using Tick = std::uint64_t;

struct QueuedIdea {
  IdeaId idea_id = 0;
  double score = 0.0;
  bool pinned = false;
  Tick enqueued_tick = 0;

  friend bool operator==(const QueuedIdea&, const QueuedIdea&) = default;
};

// Queue order: score descending, then earlier enqueue, then lower id.
bool queue_before(const QueuedIdea& x, const QueuedIdea& y) noexcept;

struct CollectorConfig {
  std::uint64_t capacity = 16;
  double half_life_ticks = 8.0;
  std::uint64_t realizations_per_tick = 1;

  friend bool operator==(const CollectorConfig&, const CollectorConfig&) = default;
};

void validate(const CollectorConfig& cfg);

class CollectorFull : public Error {
public:
  using Error::Error;
};

// Ideas waiting for realization. Owned by one agent; not thread-safe.
class Collector {
public:
  explicit Collector(CollectorConfig cfg = {}) : cfg_(cfg) {}

  const CollectorConfig& config() const noexcept { return cfg_; }
  std::span<const QueuedIdea> items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }

  // Inserts in order. Over capacity, the lowest-ordered unpinned item is
  // evicted and returned (possibly `item` itself). Throws CollectorFull and
  // leaves the queue unchanged when every item, including `item`, is pinned.
  std::optional<QueuedIdea> enqueue(const QueuedIdea& item);

  // Multiplies unpinned scores by 2^(-dt/half_life) and removes those now
  // below `realization_threshold`. Returns the purged items in queue order.
  std::vector<QueuedIdea> decay(double dt, double realization_threshold);

  // Removes and returns up to realizations_per_tick head items.
  std::vector<QueuedIdea> pop_for_realization();

private:
  CollectorConfig cfg_;
  std::vector<QueuedIdea> items_;
};

} // namespace psychot
