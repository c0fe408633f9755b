#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "psychot/affect.hpp"
#include "psychot/collector.hpp"
#include "psychot/dynamics.hpp"
#include "psychot/event.hpp"
#include "psychot/mental_space.hpp"
#include "psychot/unconscious.hpp"

namespace psychot {

// Internal-target attractors may be re-dispatched at most this many times
// per idea per tick; the next one ends the idea with NoSolution.
inline constexpr std::uint32_t kMaxInternalChain = 3;

struct RoutingRule {
  MentalPoint prefix;
  std::string processor;
  friend bool operator==(const RoutingRule&, const RoutingRule&) = default;
};

struct AgentConfig {
  std::string id = "psychot";
  int model_level = 1;
  MetricSpec metric;
  std::vector<ProcessorSpec> processors;
  // Longest matching prefix wins; unmatched ideas go round-robin over the
  // SCC-target processors.
  std::vector<RoutingRule> routing;
  Database interest_db{"interest"};
  Database interdiction_db{"interdiction"};
  Thresholds thresholds;
  EmotionProfile profile;
  CollectorConfig collector;
  UnconsciousConfig unconscious;
  bool learning = false; // realized points join the interest database
  std::uint64_t seed = 0;

  friend bool operator==(const AgentConfig&, const AgentConfig&) = default;
};

void validate(const AgentConfig& cfg);

// Seed-independent encoding of a free-text label into a point: FNV-1a 64
// over the bytes, then one splitmix64 step per digit, digit = state mod p.
MentalPoint encode_label(const MetricSpec& space, std::string_view label);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

struct AgentMetrics {
  std::uint64_t realizations = 0;
  std::uint64_t symptoms = 0;
  std::uint64_t repressions = 0;
  std::uint64_t blocks = 0;
  std::uint64_t purges = 0;
  std::uint64_t no_solutions = 0;
  std::uint64_t discards = 0;
  double pleasure_sum = 0.0;
  std::uint64_t pleasure_count = 0;

  double mean_pleasure() const noexcept {
    return pleasure_count == 0 ? 0.0 : pleasure_sum / static_cast<double>(pleasure_count);
  }
  friend bool operator==(const AgentMetrics&, const AgentMetrics&) = default;
};

struct QueueEntry {
  IdeaId idea = 0;
  std::string point;
  double score = 0.0;
  bool pinned = false;
  Tick enqueued_tick = 0;
  Tick age = 0;
  friend bool operator==(const QueueEntry&, const QueueEntry&) = default;
};

struct WishEntry {
  IdeaId idea = 0;
  std::string point;
  Tick repressed_tick = 0;
  std::uint64_t leak_count = 0;
  Tick age = 0;
  friend bool operator==(const WishEntry&, const WishEntry&) = default;
};

struct AgentSnapshot {
  std::string agent;
  int model_level = 1;
  Tick tick = 0;
  std::vector<QueueEntry> queue;
  std::vector<std::string> interest_db;
  std::vector<std::string> interdiction_db;
  std::vector<std::string> hidden_db;
  std::vector<WishEntry> repressed;
  Thresholds thresholds;
  EmotionProfile profile;
  AgentMetrics metrics;
  std::size_t pending = 0; // ideas dispatched for the next tick

  friend bool operator==(const AgentSnapshot&, const AgentSnapshot&) = default;
};

struct Injected {
  IdeaId idea = 0;
  MentalPoint point;
};

// One psychot. A single-writer state machine advancing in discrete ticks;
// every transition is appended to its event log.
//
// A tick runs four phases in fixed order: leaks from the repressed
// collector (level 4), thinking (iterate every pending idea and route the
// result), collector decay and purge, realization.
class Agent {
public:
  explicit Agent(AgentConfig cfg);

  const AgentConfig& config() const noexcept { return cfg_; }
  const std::string& id() const noexcept { return cfg_.id; }
  // Number of completed ticks; also the tick index the next tick() runs.
  Tick current_tick() const noexcept { return tick_; }
  const std::vector<Event>& events() const noexcept { return events_; }

  // `source` is recorded on the StimulusEncoded event ("external" or "coupled").
  Injected inject_stimulus(const MentalPoint& point, std::string_view source = "external");
  // A valid point literal is taken verbatim; anything else is a label.
  Injected inject(std::string_view point_or_label, std::string_view source = "external");

  // Validates, applies from the next tick, and logs a ConfigChanged marker.
  void apply_patch(const ConfigPatch& patch);

  void tick();

  // Points realized during the most recent tick, in realization order.
  const std::vector<MentalPoint>& realized_last_tick() const noexcept { return realized_last_tick_; }

  AgentSnapshot snapshot() const;
  const AgentMetrics& metrics() const noexcept { return metrics_; }
  std::size_t queue_size() const noexcept { return collector_.size(); }

private:
  struct IdeaState {
    MentalPoint point;
    std::optional<IdeaId> root_wish;
    std::uint32_t retries_used = 0;
    std::uint32_t uc_arrivals = 0;
    Measures measures;
  };

  struct Pending {
    IdeaId idea = 0;
    std::size_t processor = 0;
    std::uint32_t internal_chain = 0;
  };

  Event& emit(EventKind kind, std::optional<IdeaId> idea = std::nullopt);
  std::size_t route(const MentalPoint& point);
  void dispatch(IdeaId idea, std::size_t processor, std::vector<Pending>& into, std::uint32_t chain = 0);
  void think(const Pending& item, std::vector<Pending>& work);
  void deliver_to_scc(IdeaId idea, const ProcessorSpec& proc, std::size_t proc_index);
  void realize(IdeaId idea, std::optional<double> score);
  void finish(IdeaId idea) { ideas_.erase(idea); }

  AgentConfig cfg_;
  Collector collector_;
  UnconsciousStore unconscious_;
  std::mt19937_64 rng_;
  Tick tick_ = 0;
  std::uint64_t seq_ = 0;
  IdeaId next_idea_ = 1;
  std::size_t round_robin_ = 0;
  std::vector<std::size_t> scc_processors_;
  std::map<IdeaId, IdeaState> ideas_;
  std::vector<Pending> pending_;
  std::vector<Event> events_;
  std::vector<MentalPoint> realized_last_tick_;
  AgentMetrics metrics_;
};

} // namespace psychot
