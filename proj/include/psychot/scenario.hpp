#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "psychot/agent.hpp"

namespace psychot {

enum class Coupling { None, Broadcast };

struct StimulusAction {
  std::string point_or_label;
  friend bool operator==(const StimulusAction&, const StimulusAction&) = default;
};

struct PatchAction {
  ConfigPatch patch;
  friend bool operator==(const PatchAction&, const PatchAction&) = default;
};

// Something that happens to one agent before the given tick runs. Actions
// for the same (tick, agent) apply in document order.
struct ScheduledAction {
  Tick tick = 0;
  std::string agent;
  std::variant<StimulusAction, PatchAction> action;
  friend bool operator==(const ScheduledAction&, const ScheduledAction&) = default;
};

struct Scenario {
  MetricSpec metric;
  std::vector<AgentConfig> agents;
  std::vector<ScheduledAction> schedule;
  Coupling coupling = Coupling::None;
  Tick run_ticks = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Per-agent stream seed: splitmix64(scenario_seed XOR fnv1a64(agent_id)).
std::uint64_t derive_agent_seed(std::uint64_t scenario_seed, std::string_view agent_id) noexcept;

// Re-derives every agent seed after the scenario seed changes.
void reseed(Scenario& scenario, std::uint64_t seed);

// Checks every invariant of every nested type; throws ValidationError with
// a JSON-pointer path into the document.
void validate(const Scenario& scenario);

// Parses and validates. Throws ParseError (line/column) or ValidationError.
Scenario load_scenario(std::string_view text);
Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::ordered_json to_json(const Scenario& scenario);

nlohmann::ordered_json to_json(const Thresholds& th);
nlohmann::ordered_json to_json(const EmotionProfile& profile);
nlohmann::ordered_json to_json(const AgentSnapshot& snapshot);

} // namespace psychot
