#pragma once

#include <random>
#include <span>
#include <vector>

#include "psychot/collector.hpp"
#include "psychot/dynamics.hpp"
#include "psychot/mental_space.hpp"

namespace psychot {

struct RepressedWish {
  IdeaId idea_id = 0;
  MentalPoint point;
  Tick repressed_tick = 0;
  std::uint64_t leak_count = 0;

  friend bool operator==(const RepressedWish&, const RepressedWish&) = default;
};

struct UnconsciousConfig {
  double leak_rate = 0.0;          // per wish, per tick
  std::uint32_t retry_attempts = 2; // re-dispatches of a doubtful idea before repression

  friend bool operator==(const UnconsciousConfig&, const UnconsciousConfig&) = default;
};

void validate(const UnconsciousConfig& cfg);

class DuplicateWish : public Error {
public:
  using Error::Error;
};

// Portable uniform draw in [0, 1) from the top 53 bits of one engine output.
double uniform01(std::mt19937_64& rng) noexcept;

// The collector of repressed ideas. Nothing is ever removed from it.
class UnconsciousStore {
public:
  UnconsciousStore() : hidden_db_("hidden_wishes") {}

  std::span<const RepressedWish> wishes() const noexcept { return wishes_; }
  const Database& hidden_db() const noexcept { return hidden_db_; }

  // Throws DuplicateWish when idea_id is already stored.
  void repress(IdeaId idea_id, const MentalPoint& point, Tick tick);

  // Each wish is selected independently with probability leak_rate, in
  // repression order. Selected wishes stay stored; their leak_count grows.
  std::vector<RepressedWish> select_leaks(double leak_rate, std::mt19937_64& rng);

private:
  std::vector<RepressedWish> wishes_;
  Database hidden_db_;
};

enum class Resistance { Pass, Blocked };

// Unconscious interdiction of the point against the hidden wishes, compared
// strictly against the processor's blocking threshold.
double unconscious_interdiction(const MetricSpec& space, const MentalPoint& x, const Database& hidden_db);
Resistance resistance_check(const MetricSpec& space, const MentalPoint& x, const Database& hidden_db,
                            const ProcessorSpec& proc);

} // namespace psychot
