#include "psychot/simulation.hpp"

#include <algorithm>
#include <exception>
#include <istream>
#include <map>
#include <ostream>
#include <set>

namespace psychot {

using nlohmann::ordered_json;

ordered_json to_json(const RunReport& report) {
  ordered_json j;
  j["ticks"] = report.ticks;
  ordered_json agents = ordered_json::array();
  for (const auto& a : report.agents) {
    ordered_json ja;
    ja["agent"] = a.agent;
    ja["realizations"] = a.counts.realizations;
    ja["symptoms"] = a.counts.symptoms;
    ja["repressions"] = a.counts.repressions;
    ja["blocks"] = a.counts.blocks;
    ja["purges"] = a.counts.purges;
    ja["no_solutions"] = a.counts.no_solutions;
    ja["mean_pleasure_series"] = a.mean_pleasure_series;
    ja["queue_depth_series"] = a.queue_depth_series;
    agents.push_back(std::move(ja));
  }
  j["agents"] = std::move(agents);
  return j;
}

Society::Society(const Scenario& scenario) : coupling_(scenario.coupling) {
  agents_.reserve(scenario.agents.size());
  for (const auto& cfg : scenario.agents) agents_.emplace_back(cfg);
  cursors_.assign(agents_.size(), 0);
}

std::size_t Society::find(std::string_view id) const noexcept {
  for (std::size_t i = 0; i < agents_.size(); ++i)
    if (agents_[i].id() == id) return i;
  return agents_.size();
}

std::vector<std::string> Society::agent_ids() const {
  std::vector<std::string> ids;
  for (const auto& a : agents_) ids.push_back(a.id());
  return ids;
}

std::optional<Injected> Society::apply(const ScheduledAction& action) {
  const auto i = find(action.agent);
  if (i == agents_.size()) throw ValidationError("/agent", "unknown agent '" + action.agent + "'");
  if (const auto* st = std::get_if<StimulusAction>(&action.action)) return agents_[i].inject(st->point_or_label);
  agents_[i].apply_patch(std::get<PatchAction>(action.action).patch);
  return std::nullopt;
}

std::vector<Event> Society::step(bool parallel) {
  if (coupling_ == Coupling::Broadcast && tick_ > 0) {
    for (std::size_t src = 0; src < agents_.size(); ++src) {
      const auto realized = agents_[src].realized_last_tick();
      for (const auto& point : realized)
        for (std::size_t dst = 0; dst < agents_.size(); ++dst)
          if (dst != src) agents_[dst].inject_stimulus(point, "coupled");
    }
  }

  const auto n = static_cast<std::ptrdiff_t>(agents_.size());
  std::vector<std::exception_ptr> errors(agents_.size());
#pragma omp parallel for schedule(dynamic, 1) if (parallel && n > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      agents_[static_cast<std::size_t>(i)].tick();
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ++tick_;
  return drain();
}

std::vector<Event> Society::drain() {
  std::vector<Event> merged;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto& log = agents_[i].events();
    merged.insert(merged.end(), log.begin() + static_cast<std::ptrdiff_t>(cursors_[i]), log.end());
    cursors_[i] = log.size();
  }
  return merged;
}

std::vector<AgentSnapshot> Society::snapshots() const {
  std::vector<AgentSnapshot> out;
  out.reserve(agents_.size());
  for (const auto& a : agents_) out.push_back(a.snapshot());
  return out;
}

std::vector<ScheduledAction> schedule_in_order(const Scenario& scenario) {
  auto out = scenario.schedule;
  std::stable_sort(out.begin(), out.end(),
                   [](const ScheduledAction& x, const ScheduledAction& y) { return x.tick < y.tick; });
  return out;
}

RunResult run(const Scenario& scenario, const RunOptions& options) {
  validate(scenario);
  Society society(scenario);
  RunResult result;
  result.agents = society.agent_ids();
  result.report.ticks = scenario.run_ticks;
  for (const auto& id : result.agents) result.report.agents.push_back(AgentReport{id, {}, {}, {}});

  auto write = [&](const std::string& line, Tick completed) {
    if (!options.log) return;
    *options.log << line << '\n';
    if (!*options.log) throw RunAborted(completed, "event log write failed after " + std::to_string(completed) + " ticks");
  };

  write(format_header(result.agents), 0);
  const auto schedule = schedule_in_order(scenario);
  std::size_t next_action = 0;
  for (Tick t = 0; t < scenario.run_ticks; ++t) {
    while (next_action < schedule.size() && schedule[next_action].tick == t) society.apply(schedule[next_action++]);
    auto events = society.step(options.parallel);
    for (const auto& e : events) write(format_event(e), t);
    result.events.insert(result.events.end(), std::make_move_iterator(events.begin()),
                         std::make_move_iterator(events.end()));
    for (std::size_t i = 0; i < society.size(); ++i) {
      const auto& agent = society.agent(i);
      const auto& m = agent.metrics();
      auto& rep = result.report.agents[i];
      rep.counts = AgentCounts{m.realizations, m.symptoms, m.repressions, m.blocks, m.purges, m.no_solutions};
      rep.mean_pleasure_series.push_back(m.mean_pleasure());
      rep.queue_depth_series.push_back(agent.queue_size());
    }
    if (options.on_tick) options.on_tick(society);
  }
  write(format_footer(scenario.run_ticks), scenario.run_ticks);
  if (options.log) options.log->flush();
  return result;
}

RunReport analyze(const ParsedLog& log) {
  struct Tally {
    AgentReport report;
    std::set<IdeaId> queued;
    double pleasure_sum = 0.0;
    std::uint64_t pleasure_count = 0;
  };
  std::map<std::string, std::size_t> index;
  std::vector<Tally> tallies;
  for (const auto& id : log.agents) {
    index.emplace(id, tallies.size());
    tallies.push_back(Tally{AgentReport{id, {}, {}, {}}, {}, 0.0, 0});
  }

  Tick ticks = 0;
  if (log.ticks) ticks = *log.ticks;
  else if (!log.events.empty()) ticks = log.events.back().tick + 1;

  auto close_tick = [&] {
    for (auto& t : tallies) {
      t.report.mean_pleasure_series.push_back(
          t.pleasure_count == 0 ? 0.0 : t.pleasure_sum / static_cast<double>(t.pleasure_count));
      t.report.queue_depth_series.push_back(t.queued.size());
    }
  };

  Tick current = 0;
  for (const auto& e : log.events) {
    if (e.tick < current) throw Error("log is not ordered by tick at agent '" + e.agent + "'");
    while (current < e.tick && current < ticks) {
      close_tick();
      ++current;
    }
    auto it = index.find(e.agent);
    if (it == index.end()) throw Error("event for agent '" + e.agent + "' not named in the log header");
    auto& t = tallies[it->second];
    auto& c = t.report.counts;
    switch (e.kind) {
    case EventKind::Queued: t.queued.insert(e.idea.value_or(0)); break;
    case EventKind::Realized:
      ++c.realizations;
      t.queued.erase(e.idea.value_or(0));
      if (e.measures && e.measures->pleasure) {
        t.pleasure_sum += *e.measures->pleasure;
        ++t.pleasure_count;
      }
      break;
    case EventKind::Purged:
      ++c.purges;
      t.queued.erase(e.idea.value_or(0));
      break;
    case EventKind::Discarded: t.queued.erase(e.idea.value_or(0)); break;
    case EventKind::Symptom: ++c.symptoms; break;
    case EventKind::Repressed: ++c.repressions; break;
    case EventKind::Blocked: ++c.blocks; break;
    case EventKind::NoSolution: ++c.no_solutions; break;
    default: break;
    }
  }
  while (current < ticks) {
    close_tick();
    ++current;
  }

  RunReport report;
  report.ticks = ticks;
  for (auto& t : tallies) report.agents.push_back(std::move(t.report));
  return report;
}

RunReport analyze(std::istream& in) { return analyze(parse_log(in)); }

std::vector<ScheduledAction> recorded_actions(const ParsedLog& log) {
  std::vector<ScheduledAction> actions;
  for (const auto& e : log.events) {
    if (e.kind == EventKind::StimulusEncoded && e.detail == "external" && e.point)
      actions.push_back(ScheduledAction{e.tick, e.agent, StimulusAction{*e.point}});
    else if (e.kind == EventKind::ConfigChanged && e.patch)
      actions.push_back(ScheduledAction{e.tick, e.agent, PatchAction{*e.patch}});
  }
  return actions;
}

} // namespace psychot
