#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "psychot/agent.hpp"
#include "psychot/event_log.hpp"
#include "psychot/scenario.hpp"

namespace psychot {

struct AgentCounts {
  std::uint64_t realizations = 0;
  std::uint64_t symptoms = 0;
  std::uint64_t repressions = 0;
  std::uint64_t blocks = 0;
  std::uint64_t purges = 0;
  std::uint64_t no_solutions = 0;
  friend bool operator==(const AgentCounts&, const AgentCounts&) = default;
};

struct AgentReport {
  std::string agent;
  AgentCounts counts;
  // Entry t is the running mean pleasure of realized ideas after tick t.
  std::vector<double> mean_pleasure_series;
  // Entry t is the collector size after tick t.
  std::vector<std::uint64_t> queue_depth_series;
  friend bool operator==(const AgentReport&, const AgentReport&) = default;
};

struct RunReport {
  Tick ticks = 0;
  std::vector<AgentReport> agents;
  friend bool operator==(const RunReport&, const RunReport&) = default;
};

nlohmann::ordered_json to_json(const RunReport& report);

// A set of agents advancing in lock step. Agents never touch each other's
// state inside a tick; broadcast coupling moves realized points between
// ticks, so a step is a data-parallel loop over agents.
class Society {
public:
  explicit Society(const Scenario& scenario);

  std::size_t size() const noexcept { return agents_.size(); }
  Agent& agent(std::size_t i) { return agents_[i]; }
  const Agent& agent(std::size_t i) const { return agents_[i]; }
  // Index of the agent with the given id, or size() when absent.
  std::size_t find(std::string_view id) const noexcept;
  std::vector<std::string> agent_ids() const;
  Tick current_tick() const noexcept { return tick_; }

  // Applies a stimulus or patch to its agent immediately (the tick field is
  // not consulted). Returns the injected idea for stimuli.
  std::optional<Injected> apply(const ScheduledAction& action);

  // Delivers coupled stimuli, runs one tick on every agent, and returns the
  // tick's events in (agent order, seq) order. `parallel` selects the
  // OpenMP loop over agents; the serial loop is the reference.
  std::vector<Event> step(bool parallel = true);

  // Events emitted since the last step or drain (stimuli and patches
  // applied between ticks), in (agent order, seq) order.
  std::vector<Event> drain();

  std::vector<AgentSnapshot> snapshots() const;

private:
  std::vector<Agent> agents_;
  std::vector<std::size_t> cursors_;
  Coupling coupling_;
  Tick tick_ = 0;
};

class RunAborted : public Error {
public:
  RunAborted(Tick completed, const std::string& what) : Error(what), completed_(completed) {}
  Tick completed_ticks() const noexcept { return completed_; }

private:
  Tick completed_;
};

struct RunOptions {
  bool parallel = true;
  std::ostream* log = nullptr; // receives header, events and footer
  std::function<void(const Society&)> on_tick; // called after every tick
};

struct RunResult {
  std::vector<std::string> agents;
  std::vector<Event> events;
  RunReport report;
};

// The schedule stably sorted by tick: document order within a tick.
std::vector<ScheduledAction> schedule_in_order(const Scenario& scenario);

// Throws RunAborted when the log stream fails mid-run.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

// Recomputes the report from the log alone.
RunReport analyze(const ParsedLog& log);
RunReport analyze(std::istream& log);

// External actions recorded in a log (stimuli tagged "external" and
// ConfigChanged markers), in log order. Used to replay a session offline.
std::vector<ScheduledAction> recorded_actions(const ParsedLog& log);

} // namespace psychot
