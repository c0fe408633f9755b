#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "psychot/kernels.hpp"
#include "psychot/simulation.hpp"

using namespace psychot;
namespace k = psychot::kernels;

namespace {

ProcessorSpec square_processor(const MetricSpec& space) {
  return ProcessorSpec{"square", MonomialMap{2}, OutputTarget::SCC, std::nullopt, default_max_steps(space)};
}

Database random_database(const MetricSpec& space, std::size_t size) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> digit(0, space.p() - 1);
  Database db("bench");
  for (std::size_t i = 0; i < size; ++i) {
    std::vector<std::uint8_t> d(static_cast<std::size_t>(space.m()));
    for (auto& x : d) x = static_cast<std::uint8_t>(digit(rng));
    db.insert(MentalPoint(std::move(d)));
  }
  return db;
}

// The example scenario with its agents (and their schedules) copied `copies` times.
Scenario crowd(int copies) {
  std::ifstream in(PSYCHOT_DOCS_DIR "/example_scenario.json");
  std::stringstream ss;
  ss << in.rdbuf();
  const Scenario base = load_scenario(ss.str());
  Scenario s = base;
  s.agents.clear();
  s.schedule.clear();
  for (int c = 0; c < copies; ++c) {
    const std::string suffix = "_" + std::to_string(c);
    for (auto agent : base.agents) {
      agent.id += suffix;
      s.agents.push_back(std::move(agent));
    }
    for (auto action : base.schedule) {
      action.agent += suffix;
      s.schedule.push_back(std::move(action));
    }
  }
  reseed(s, base.seed);
  return s;
}

void orbit_table(benchmark::State& state, bool parallel) {
  const MetricSpec space(MetricKind::PrefixUltrametric, 2, static_cast<int>(state.range(0)));
  const auto proc = square_processor(space);
  for (auto _ : state) {
    auto table = parallel ? k::orbit_table_parallel(space, proc) : k::orbit_table_serial(space, proc);
    benchmark::DoNotOptimize(table.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(space.cardinality()));
}

void measure_table(benchmark::State& state, bool parallel) {
  const MetricSpec space(MetricKind::PrefixUltrametric, 4, static_cast<int>(state.range(0)));
  const auto db = random_database(space, 32);
  for (auto _ : state) {
    auto table = parallel ? k::measure_table_parallel(space, db) : k::measure_table_serial(space, db);
    benchmark::DoNotOptimize(table.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(space.cardinality()));
}

void society_run(benchmark::State& state, bool parallel) {
  const Scenario scenario = crowd(static_cast<int>(state.range(0)));
  const auto schedule = schedule_in_order(scenario);
  for (auto _ : state) {
    Society society(scenario);
    std::size_t next = 0, events = 0;
    for (Tick t = 0; t < scenario.run_ticks; ++t) {
      while (next < schedule.size() && schedule[next].tick == society.current_tick())
        society.apply(schedule[next++]);
      events += society.drain().size();
      events += society.step(parallel).size();
    }
    benchmark::DoNotOptimize(events);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scenario.agents.size()) *
                          static_cast<std::int64_t>(scenario.run_ticks));
}

} // namespace

BENCHMARK_CAPTURE(orbit_table, serial, false)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(orbit_table, parallel, true)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(measure_table, serial, false)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(measure_table, parallel, true)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(society_run, serial, false)->Arg(4)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(society_run, parallel, true)->Arg(4)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
