// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Each check runs against an independent oracle or a scripted
// fixture under tests/fixtures.

#include <chrono>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include <httplib.h>

#include "psychot/http_api.hpp"
#include "psychot/simulation.hpp"
#include "support.hpp"

using namespace psychot;
using nlohmann::json;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

std::string run_log(const Scenario& s, bool parallel = true, RunResult* result = nullptr) {
  std::ostringstream out;
  RunOptions opt;
  opt.parallel = parallel;
  opt.log = &out;
  auto r = run(s, opt);
  if (result) *result = std::move(r);
  return out.str();
}

std::vector<Event> events_for(const std::vector<Event>& events, IdeaId idea) {
  std::vector<Event> out;
  for (const auto& e : events)
    if (e.idea == idea) out.push_back(e);
  return out;
}

const Event* find_event(const std::vector<Event>& events, EventKind kind) {
  for (const auto& e : events)
    if (e.kind == kind) return &e;
  return nullptr;
}

// --- criteria ---------------------------------------------------------------

std::string metric_axioms() {
  std::mt19937_64 rng(20240501);
  std::size_t checked = 0;
  for (auto kind : {MetricKind::PrefixUltrametric, MetricKind::Hamming})
    for (int p : {2, 3})
      for (int m : {3, 8}) {
        MetricSpec s(kind, p, m);
        for (int i = 0; i < 10000; ++i) {
          const auto x = test::random_point(s, rng), y = test::random_point(s, rng), z = test::random_point(s, rng);
          const double xy = distance(s, x, y), yx = distance(s, y, x), yz = distance(s, y, z), xz = distance(s, x, z);
          require((xy == 0.0) == (x == y), "separation fails at " + x.to_string() + ", " + y.to_string());
          require(distance(s, x, x) == 0.0, "d(x, x) != 0");
          require(xy == yx, "symmetry fails");
          require(xz <= xy + yz, "triangle fails");
          if (kind == MetricKind::PrefixUltrametric) require(xz <= std::max(xy, yz), "strong triangle fails");
          ++checked;
        }
      }
  return std::to_string(checked) + " triples over 8 spaces";
}

std::string measure_bounds() {
  std::mt19937_64 rng(77);
  std::size_t checked = 0;
  for (auto [kind, k] : {std::pair{MetricKind::PrefixUltrametric, 1.0 / 2.0}, std::pair{MetricKind::Hamming, 1.0 / 4.0}}) {
    MetricSpec s(kind, 2, 3);
    require(s.min_measure() == k, "k != 1/(L+1)");
    for (int round = 0; round < 500; ++round) {
      const auto interest_db = test::random_database(s, rng, 8);
      const auto interdiction_db = test::random_database(s, rng, 8);
      bool hit_top = false;
      for (std::uint64_t v = 0; v < s.cardinality(); ++v) {
        const auto x = s.decode(v);
        const double I = interest_measure(s, x, interest_db);
        const double D = interdiction_measure(s, x, interdiction_db);
        require(I >= k && I <= 1.0, "interest out of [k, 1]");
        require(D >= k && D <= 1.0, "interdiction out of [k, 1]");
        require((I == 1.0) == interest_db.contains(x), "interest is 1 exactly on members");
        hit_top = hit_top || I == 1.0;
        ++checked;
      }
      if (interest_db.empty())
        for (std::uint64_t v = 0; v < s.cardinality(); ++v)
          require(interest_measure(s, s.decode(v), interest_db) == k, "empty database must give k");
      require(hit_top || interest_db.empty(), "non-empty database never reaches 1");
    }
  }
  return std::to_string(checked) + " measure pairs";
}

std::string orbit_oracle() {
  std::mt19937_64 rng(1024);
  std::size_t spaces = 0, starts = 0;
  for (int p = 2; p <= kMaxAlphabet; ++p) {
    std::uint64_t n = 1;
    for (int m = 1;; ++m) {
      n *= static_cast<std::uint64_t>(p);
      if (n > 1024) break;
      MetricSpec s(MetricKind::PrefixUltrametric, p, m);
      std::vector<ThinkingMap> maps;
      for (std::uint32_t e : {1u, 2u, 3u, 4u, 5u, 7u}) maps.push_back(MonomialMap{e});
      std::uniform_int_distribution<std::uint64_t> coef(0, n - 1);
      maps.push_back(AffineMap{1, 0});
      maps.push_back(AffineMap{1, 1 % n});
      maps.push_back(AffineMap{0, coef(rng)});
      for (int i = 0; i < 3; ++i) maps.push_back(AffineMap{coef(rng), coef(rng)});
      for (int r = 0; r < 3; ++r) {
        PrefixRewriteMap rw;
        std::set<MentalPoint> used;
        for (int i = 0; i < 4; ++i) {
          const auto len = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, m)(rng));
          const auto a = test::random_point(s, rng), b = test::random_point(s, rng);
          MentalPoint from(std::vector<std::uint8_t>(a.digits().begin(), a.digits().begin() + static_cast<std::ptrdiff_t>(len)));
          MentalPoint to(std::vector<std::uint8_t>(b.digits().begin(), b.digits().begin() + static_cast<std::ptrdiff_t>(len)));
          if (used.insert(from).second) rw.rules.push_back({from, to});
        }
        maps.push_back(rw);
      }

      std::vector<std::uint64_t> next(n), seen_at(n);
      for (const auto& map : maps) {
        ProcessorSpec proc{"f", map, OutputTarget::SCC, std::nullopt, default_max_steps(s)};
        validate(s, proc);
        for (std::uint64_t v = 0; v < n; ++v) next[v] = test::oracle_step(p, m, map, v);
        for (std::uint64_t v0 = 0; v0 < n; ++v0) {
          // Exhaustive walk with a visited-index table.
          std::fill(seen_at.begin(), seen_at.end(), ~std::uint64_t{0});
          std::vector<std::uint64_t> orbit;
          std::uint64_t v = v0;
          while (seen_at[v] == ~std::uint64_t{0}) {
            seen_at[v] = orbit.size();
            orbit.push_back(v);
            v = next[v];
          }
          const auto entry = seen_at[v];
          const auto period = orbit.size() - entry;
          const auto out = iterate(s, proc, s.decode(v0));
          if (period == 1) {
            const auto* a = std::get_if<Attractor>(&out);
            require(a && s.encode(a->point) == v && a->steps == entry, "attractor mismatch");
          } else {
            const auto* c = std::get_if<Cycle>(&out);
            require(c && c->period == period, "cycle mismatch");
            for (std::size_t i = 0; i < period; ++i) require(s.encode(c->points[i]) == orbit[entry + i], "cycle points mismatch");
          }
          ++starts;
        }
      }
      ++spaces;
    }
  }
  return std::to_string(spaces) + " spaces, " + std::to_string(starts) + " orbits";
}

std::string storm_of_cravings() {
  auto s = test::load_fixture("storm.json");
  const auto& cfg = s.agents[0];
  const auto x = cfg.metric.parse("a5");
  const double I = interest_measure(cfg.metric, x, cfg.interest_db);
  const double D = interdiction_measure(cfg.metric, x, cfg.interdiction_db);
  require(std::abs(I - 0.95) < 1e-12 && std::abs(D - 0.95) < 1e-12, "fixture measures are not 0.95");

  s.agents[0].model_level = 3;
  const auto l3 = events_for(run(s).events, 1);
  s.agents[0].model_level = 4;
  const auto l4 = events_for(run(s).events, 1);
  require(find_event(l3, EventKind::Queued) != nullptr, "level 3 did not queue the idea");
  require(find_event(l3, EventKind::Repressed) == nullptr, "level 3 repressed the idea");
  require(find_event(l4, EventKind::Repressed) != nullptr, "level 4 did not repress the idea");
  require(find_event(l4, EventKind::Queued) == nullptr, "level 4 queued the idea");
  return "level 3 Queued, level 4 Repressed (I = D = 0.95)";
}

std::string symptom_pathway() {
  const auto s = test::load_fixture("symptom.json");
  const auto events = run(s).events;
  const auto* rep = find_event(events, EventKind::Repressed);
  require(rep != nullptr, "no repression");
  for (const auto& e : events) {
    if (e.kind != EventKind::Realized || e.root_wish != rep->idea) continue;
    require(e.tick >= rep->tick && e.tick <= rep->tick + 5, "symptom outside the 5-tick window");
    require(e.point != rep->point, "symptom point equals the wish point");
    const bool tagged = std::any_of(events.begin(), events.end(), [&](const Event& f) {
      return f.kind == EventKind::Symptom && f.idea == e.idea && f.root_wish == rep->idea;
    });
    require(tagged, "realized leak is not tagged Symptom");
    return "wish " + *rep->point + " (idea " + std::to_string(*rep->idea) + ", tick " + std::to_string(rep->tick) +
           ") -> symptom " + *e.point + " at tick " + std::to_string(e.tick);
  }
  throw Failure("no realized symptom traced to the repressed idea");
}

std::string resistance() {
  auto s = test::load_fixture("resistance.json");
  const auto& space = s.agents[0].metric;
  const auto& proc = s.agents[0].processors[0];
  const auto w = space.parse("110");
  const auto out = iterate(space, proc, space.parse("100"));
  require(std::holds_alternative<Attractor>(out) && std::get<Attractor>(out).point == w, "attractor is not w");

  auto events = run(s).events;
  const auto* rep = find_event(events, EventKind::Repressed);
  require(rep && rep->point == "110", "wish w was not repressed first");
  const auto later = events_for(events, 2);
  const auto* blocked = find_event(later, EventKind::Blocked);
  require(blocked != nullptr, "threshold 0.8 did not block");
  require(blocked->measures && blocked->measures->unconscious == 1.0, "unconscious interdiction is not 1");
  require(later.back().kind == EventKind::Blocked, "events follow the block");
  for (const auto& e : later)
    require(e.kind != EventKind::Queued && e.kind != EventKind::Realized && e.kind != EventKind::Discarded &&
                e.kind != EventKind::Repressed,
            "blocked idea reached the subconsciousness");

  s.agents[0].processors[0].blocking_threshold = 1.0;
  events = run(s).events;
  const auto passed = events_for(events, 2);
  require(find_event(passed, EventKind::Blocked) == nullptr, "threshold 1 still blocked (comparison not strict)");
  require(find_event(passed, EventKind::Repressed) != nullptr, "idea did not reach the analyzer after passing");
  return "0.8 -> Blocked, 1.0 -> Pass";
}

std::string decay_law() {
  AgentConfig cfg;
  cfg.id = "decay";
  cfg.model_level = 3;
  cfg.metric = MetricSpec(MetricKind::PrefixUltrametric, 2, 3);
  cfg.processors.push_back(ProcessorSpec{"still", PrefixRewriteMap{}, OutputTarget::SCC, std::nullopt, 8});
  cfg.interest_db.insert(cfg.metric.parse("000"));
  cfg.thresholds = {0.0, 0.9, 2.0, 2.0};
  cfg.profile = {1.0, 0.0};
  cfg.collector = {4, 4.0, 0};
  Agent a(cfg);
  const auto unpinned = a.inject("001").idea; // I = 1/(1/4 + 1) = 0.8
  const auto pinned = a.inject("000").idea;   // I = 1
  double pinned_start = 0;
  std::string detail;
  for (int t = 0; t < 100; ++t) {
    a.tick();
    const auto snap = a.snapshot();
    for (const auto& q : snap.queue) {
      if (q.idea == pinned) {
        if (t == 0) pinned_start = q.score;
        require(std::memcmp(&q.score, &pinned_start, sizeof(double)) == 0, "pinned score changed");
      }
      if (q.idea == unpinned && (q.age == 4 || q.age == 8)) {
        const double want = q.age == 4 ? 0.4 : 0.2;
        require(std::abs(q.score - want) <= 1e-9, "unpinned score " + std::to_string(q.score) + " at age " +
                                                      std::to_string(q.age));
        detail += (detail.empty() ? "" : ", ") + std::string("age ") + std::to_string(q.age) + ": " +
                  std::to_string(q.score);
      }
    }
  }
  require(detail.find("age 8") != std::string::npos, "unpinned idea vanished early");
  return detail + "; pinned bit-identical over 100 ticks";
}

std::string model_reduction() {
  auto s = test::load_fixture("reduction.json");
  require(s.run_ticks == 50 && s.schedule.size() == 20, "fixture is not 50 ticks / 20 stimuli");
  for (const auto& p : s.agents[0].processors) require(p.blocking_threshold == 1.0, "blocking threshold is not 1");
  require(s.agents[0].thresholds.max_interest > 1 && s.agents[0].thresholds.max_interdiction > 1, "maxima not above 1");
  s.agents[0].model_level = 3;
  RunResult r3;
  const auto log3 = run_log(s, true, &r3);
  s.agents[0].model_level = 4;
  const auto log4 = run_log(s);
  require(log3 == log4, "level 3 and level 4 logs differ");
  require(r3.report.agents[0].counts.realizations > 0, "fixture realizes nothing");
  return std::to_string(r3.events.size()) + " identical events";
}

std::string determinism_replay() {
  std::vector<Scenario> scenarios;
  scenarios.push_back(load_scenario(test::read_text(std::string(PSYCHOT_DOCS_DIR) + "/example_scenario.json")));
  for (const char* f : {"storm.json", "symptom.json", "resistance.json", "reduction.json"})
    scenarios.push_back(test::load_fixture(f));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto s = scenarios[0];
    reseed(s, seed);
    for (auto& a : s.agents) a.unconscious.leak_rate = 0.5;
    scenarios.push_back(s);
  }
  std::size_t bytes = 0;
  for (const auto& s : scenarios) {
    RunResult result;
    const auto a = run_log(s, true, &result);
    require(a == run_log(s, true), "two runs differ");
    require(a == run_log(s, false), "parallel and serial runs differ");
    std::istringstream in(a);
    require(analyze(in) == result.report, "analyze(log) differs from the run report");
    bytes += a.size();
  }
  return std::to_string(scenarios.size()) + " scenarios, " + std::to_string(bytes) + " log bytes";
}

std::string service_replay() {
  const auto doc = test::read_text(std::string(PSYCHOT_DOCS_DIR) + "/example_scenario.json");
  const auto log_dir = std::filesystem::temp_directory_path() / "psychot_acceptance";
  std::filesystem::create_directories(log_dir);
  HttpService service(std::make_shared<SessionManager>(log_dir));
  const int port = service.start();
  httplib::Client c("127.0.0.1", port);
  auto post = [&](const std::string& path, const json& body) {
    auto r = c.Post(path, body.dump(), "application/json");
    require(r && r->status / 100 == 2, "request " + path + " failed: " + (r ? r->body : std::string("no response")));
    return json::parse(r->body);
  };
  require(post("/sessions", json::parse(doc))["session_id"] == "s1", "unexpected session id");

  const std::vector<std::string> labels = {"a knock at the door", "the smell of rain", "a broken promise", "012", "201"};
  std::vector<json> live;
  std::size_t patches = 0, stimuli = 0;
  for (int t = 0; t < 30; ++t) {
    if (t % 3 == 0) {
      post("/sessions/s1/stimuli", {{"agent", t % 2 ? "ada" : "ben"}, {"stimulus", labels[t % labels.size()]}});
      ++stimuli;
    }
    if (t % 7 == 2) {
      const double v = t % 2 ? 0.85 : 1.5;
      post("/sessions/s1/thresholds", {{"agent", "ada"}, {"thresholds", {{"max_interest", v}, {"max_interdiction", v}}}});
      ++patches;
    }
    if (t == 11) {
      post("/sessions/s1/thresholds", {{"agent", "ben"}, {"profile", {{"a", 4.0}}}});
      ++patches;
    }
    post("/sessions/s1/advance", {{"ticks", 1}});
    auto st = c.Get("/sessions/s1/state");
    require(st && st->status == 200, "state failed");
    live.push_back(json::parse(st->body)["agents"]);
  }
  const auto ended = post("/sessions/s1/end", {{"persist", true}});
  service.stop();
  require(ended["log"].is_string(), "session log was not persisted");

  // Offline: the recorded external stimuli and ConfigChanged markers become
  // the schedule of a plain batch run.
  std::istringstream in(test::read_text(ended["log"].get<std::string>()));
  const auto log = parse_log(in);
  auto replay = load_scenario(doc);
  replay.schedule = recorded_actions(log);
  replay.run_ticks = 30;
  std::size_t markers = 0;
  for (const auto& a : replay.schedule) markers += std::holds_alternative<PatchAction>(a.action);
  require(markers == patches + 1, "ConfigChanged markers missing from the log");

  std::vector<json> offline;
  RunOptions opt;
  opt.on_tick = [&](const Society& society) {
    json agents = json::array();
    for (const auto& snap : society.snapshots()) agents.push_back(json(to_json(snap)));
    offline.push_back(std::move(agents));
  };
  const auto result = run(replay, opt);
  require(offline.size() == live.size(), "tick count differs");
  for (std::size_t t = 0; t < live.size(); ++t)
    require(offline[t] == live[t], "snapshot differs at tick " + std::to_string(t));
  require(result.events == log.events, "replayed event log differs");
  return std::to_string(live.size()) + " per-tick snapshots equal (" + std::to_string(stimuli) + " stimuli, " +
         std::to_string(patches) + " live patches)";
}

} // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;
    std::function<std::string()> check;
  };
  const std::vector<Criterion> criteria = {
      {"metric axioms", 1.0, metric_axioms},
      {"measure bounds", 1.0, measure_bounds},
      {"orbit oracle", 10.0, orbit_oracle},
      {"storm of cravings vs doubt", 0, storm_of_cravings},
      {"symptom pathway", 0, symptom_pathway},
      {"resistance", 0, resistance},
      {"decay law", 0, decay_law},
      {"model reduction", 0, model_reduction},
      {"determinism and replay", 0, determinism_replay},
      {"service replay", 0, service_replay},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.check();
    } catch (const std::exception& ex) {
      ok = false;
      detail = ex.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok && c.limit_s > 0 && secs >= c.limit_s) {
      ok = false;
      detail += "; took longer than " + std::to_string(c.limit_s) + " s";
    }
    failures += !ok;
    std::printf("%s  %-28s %8.3f s  %s\n", ok ? "PASS" : "FAIL", c.name, secs, detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
