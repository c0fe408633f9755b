#include "psychot/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "psychot/event_log.hpp"

namespace psychot {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Field access with JSON-pointer addressed errors.
class Reader {
public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ValidationError(path_.empty() ? "/" : path_, "expected an object");
  }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    for (const auto& [key, _] : node_.items())
      if (std::find(keys.begin(), keys.end(), key) == keys.end())
        throw ValidationError(path_ + "/" + key, "unknown field");
  }

  bool has(const char* key) const { return node_.contains(key) && !node_.at(key).is_null(); }
  std::string path(const char* key) const { return path_ + "/" + key; }

  const json& at(const char* key) const {
    if (!node_.contains(key)) throw ValidationError(path(key), "missing required field");
    return node_.at(key);
  }

  double number(const char* key) const {
    const auto& v = at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) throw ValidationError(path(key), "expected a finite number");
    return v.get<double>();
  }
  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::int64_t integer(const char* key) const {
    const auto& v = at(key);
    if (!v.is_number_integer()) throw ValidationError(path(key), "expected an integer");
    return v.get<std::int64_t>();
  }

  std::uint64_t unsigned_int(const char* key) const {
    const auto& v = at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw ValidationError(path(key), "expected a non-negative integer");
  }
  std::uint64_t unsigned_int(const char* key, std::uint64_t fallback) const {
    return has(key) ? unsigned_int(key) : fallback;
  }

  std::string string(const char* key) const {
    const auto& v = at(key);
    if (!v.is_string()) throw ValidationError(path(key), "expected a string");
    return v.get<std::string>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_boolean()) throw ValidationError(path(key), "expected true or false");
    return v.get<bool>();
  }

  const json& array(const char* key) const {
    const auto& v = at(key);
    if (!v.is_array()) throw ValidationError(path(key), "expected an array");
    return v;
  }

private:
  const json& node_;
  std::string path_;
};

MentalPoint parse_point(const MetricSpec& space, const json& v, const std::string& path) {
  if (!v.is_string()) throw ValidationError(path, "expected a point literal");
  const auto s = v.get<std::string>();
  if (!space.is_point_literal(s)) throw ValidationError(path, "'" + s + "' is not a point of this space");
  return space.parse(s);
}

// A prefix of 1..m digits.
MentalPoint parse_prefix(const MetricSpec& space, const json& v, const std::string& path) {
  if (!v.is_string()) throw ValidationError(path, "expected a digit prefix");
  const auto s = v.get<std::string>();
  if (s.empty() || s.size() > static_cast<std::size_t>(space.m()))
    throw ValidationError(path, "prefix length must lie in [1, m]");
  const auto padded = s + std::string(static_cast<std::size_t>(space.m()) - s.size(), '0');
  if (!space.is_point_literal(padded)) throw ValidationError(path, "'" + s + "' has digits outside [0, p)");
  const auto full = space.parse(padded);
  const auto digits = full.digits();
  return MentalPoint(std::vector<std::uint8_t>(digits.begin(), digits.begin() + static_cast<std::ptrdiff_t>(s.size())));
}

MetricSpec parse_metric(const json& j) {
  Reader r(j, "/metric");
  r.allow_only({"kind", "p", "m"});
  MetricKind kind = MetricKind::PrefixUltrametric;
  if (r.has("kind")) {
    try {
      kind = metric_kind_from_string(r.string("kind"));
    } catch (const ValidationError& ex) {
      throw ex.under(r.path("kind"));
    }
  }
  const auto p = r.integer("p");
  const auto m = r.integer("m");
  if (p < 2) throw ValidationError(r.path("p"), "alphabet size p must be >= 2");
  if (p > kMaxAlphabet) throw ValidationError(r.path("p"), "alphabet size p must be <= 36");
  if (m < 1) throw ValidationError(r.path("m"), "word length m must be >= 1");
  if (m > 64) throw ValidationError(r.path("m"), "space too large: p^m must stay below 2^62");
  try {
    return MetricSpec(kind, static_cast<int>(p), static_cast<int>(m));
  } catch (const ValidationError& ex) {
    throw ex.under("/metric");
  }
}

ProcessorSpec parse_processor(const MetricSpec& space, const json& j, const std::string& path) {
  Reader r(j, path);
  r.allow_only({"id", "map", "output", "blocking_threshold", "max_steps"});
  ProcessorSpec proc;
  proc.id = r.string("id");

  Reader map(r.at("map"), r.path("map"));
  const auto type = map.string("type");
  if (type == "monomial") {
    map.allow_only({"type", "n"});
    const auto n = map.integer("n");
    if (n < 1 || n > 0xffffffffLL) throw ValidationError(map.path("n"), "monomial exponent must be >= 1");
    proc.map = MonomialMap{static_cast<std::uint32_t>(n)};
  } else if (type == "affine") {
    map.allow_only({"type", "a", "b"});
    proc.map = AffineMap{map.unsigned_int("a"), map.unsigned_int("b")};
  } else if (type == "prefix_rewrite") {
    map.allow_only({"type", "rules"});
    PrefixRewriteMap rw;
    if (map.has("rules")) {
      const auto& rules = map.array("rules");
      for (std::size_t i = 0; i < rules.size(); ++i) {
        Reader rule(rules[i], map.path("rules") + "/" + std::to_string(i));
        rule.allow_only({"from", "to"});
        rw.rules.push_back(RewriteRule{parse_prefix(space, rule.at("from"), rule.path("from")),
                                       parse_prefix(space, rule.at("to"), rule.path("to"))});
      }
    }
    proc.map = std::move(rw);
  } else {
    throw ValidationError(map.path("type"), "unknown map type '" + type + "'");
  }

  try {
    proc.output_target = output_target_from_string(r.string("output"));
  } catch (const ValidationError& ex) {
    throw ValidationError(r.path("output"), ex.message());
  }
  if (r.has("blocking_threshold")) proc.blocking_threshold = r.number("blocking_threshold");
  proc.max_steps = r.unsigned_int("max_steps", default_max_steps(space));
  return proc;
}

EmotionProfile parse_profile(const json& j, const std::string& path) {
  if (j.is_string()) {
    try {
      return profile_preset(j.get<std::string>());
    } catch (const ValidationError& ex) {
      throw ValidationError(path, ex.message());
    }
  }
  Reader r(j, path);
  r.allow_only({"preset", "a", "b"});
  EmotionProfile profile;
  if (r.has("preset")) {
    try {
      profile = profile_preset(r.string("preset"));
    } catch (const ValidationError& ex) {
      throw ValidationError(r.path("preset"), ex.message());
    }
  }
  profile.a = r.number("a", profile.a);
  profile.b = r.number("b", profile.b);
  return profile;
}

AgentConfig parse_agent(const MetricSpec& space, const json& j, const std::string& path) {
  Reader r(j, path);
  r.allow_only({"id", "model_level", "processors", "routing", "interest_db", "interdiction_db", "thresholds",
                "profile", "collector", "unconscious", "learning"});
  AgentConfig cfg;
  cfg.metric = space;
  cfg.id = r.string("id");
  cfg.model_level = static_cast<int>(r.integer("model_level"));

  const auto& procs = r.array("processors");
  for (std::size_t i = 0; i < procs.size(); ++i)
    cfg.processors.push_back(parse_processor(space, procs[i], r.path("processors") + "/" + std::to_string(i)));

  if (r.has("routing")) {
    const auto& rules = r.array("routing");
    for (std::size_t i = 0; i < rules.size(); ++i) {
      Reader rule(rules[i], r.path("routing") + "/" + std::to_string(i));
      rule.allow_only({"prefix", "processor"});
      cfg.routing.push_back(RoutingRule{parse_prefix(space, rule.at("prefix"), rule.path("prefix")),
                                        rule.string("processor")});
    }
  }

  auto read_db = [&](const char* key, Database& db) {
    if (!r.has(key)) return;
    const auto& pts = r.array(key);
    for (std::size_t i = 0; i < pts.size(); ++i)
      db.insert(parse_point(space, pts[i], r.path(key) + "/" + std::to_string(i)));
  };
  read_db("interest_db", cfg.interest_db);
  read_db("interdiction_db", cfg.interdiction_db);

  if (r.has("thresholds")) {
    Reader th(r.at("thresholds"), r.path("thresholds"));
    th.allow_only({"realization", "preserving", "max_interest", "max_interdiction"});
    cfg.thresholds.realization = th.number("realization", cfg.thresholds.realization);
    cfg.thresholds.preserving = th.number("preserving", cfg.thresholds.preserving);
    cfg.thresholds.max_interest = th.number("max_interest", cfg.thresholds.max_interest);
    cfg.thresholds.max_interdiction = th.number("max_interdiction", cfg.thresholds.max_interdiction);
  }
  if (r.has("profile")) cfg.profile = parse_profile(r.at("profile"), r.path("profile"));

  if (r.has("collector")) {
    Reader c(r.at("collector"), r.path("collector"));
    c.allow_only({"capacity", "half_life_ticks", "realizations_per_tick"});
    cfg.collector.capacity = c.unsigned_int("capacity", cfg.collector.capacity);
    cfg.collector.half_life_ticks = c.number("half_life_ticks", cfg.collector.half_life_ticks);
    cfg.collector.realizations_per_tick = c.unsigned_int("realizations_per_tick", cfg.collector.realizations_per_tick);
  }
  if (r.has("unconscious")) {
    Reader u(r.at("unconscious"), r.path("unconscious"));
    u.allow_only({"leak_rate", "retry_attempts"});
    cfg.unconscious.leak_rate = u.number("leak_rate", cfg.unconscious.leak_rate);
    const auto retries = u.unsigned_int("retry_attempts", cfg.unconscious.retry_attempts);
    if (retries > 1000) throw ValidationError(u.path("retry_attempts"), "retry_attempts must be <= 1000");
    cfg.unconscious.retry_attempts = static_cast<std::uint32_t>(retries);
  }
  cfg.learning = r.boolean("learning", false);

  try {
    validate(cfg);
  } catch (const ValidationError& ex) {
    throw ex.under(path);
  } catch (const InvalidPoint& ex) {
    throw ValidationError(path, ex.what());
  }
  return cfg;
}

ScheduledAction parse_action(const json& j, const std::string& path) {
  Reader r(j, path);
  r.allow_only({"tick", "agent", "point", "label", "stimulus", "patch"});
  ScheduledAction a;
  a.tick = r.unsigned_int("tick");
  a.agent = r.string("agent");
  const int kinds = r.has("point") + r.has("label") + r.has("stimulus") + r.has("patch");
  if (kinds != 1) throw ValidationError(path, "exactly one of point, label, stimulus or patch is required");
  if (r.has("patch")) {
    a.action = PatchAction{config_patch_from_json(r.at("patch"), r.path("patch"))};
  } else {
    const char* key = r.has("point") ? "point" : r.has("label") ? "label" : "stimulus";
    a.action = StimulusAction{r.string(key)};
  }
  return a;
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

ordered_json point_list(const Database& db) {
  ordered_json arr = ordered_json::array();
  for (const auto& x : db.points()) arr.push_back(x.to_string());
  return arr;
}

} // namespace

std::uint64_t derive_agent_seed(std::uint64_t scenario_seed, std::string_view agent_id) noexcept {
  std::uint64_t state = scenario_seed ^ fnv1a64(agent_id);
  return splitmix64(state);
}

void reseed(Scenario& scenario, std::uint64_t seed) {
  scenario.seed = seed;
  for (auto& a : scenario.agents) a.seed = derive_agent_seed(seed, a.id);
}

void validate(const Scenario& s) {
  if (s.agents.empty()) throw ValidationError("/agents", "at least one agent is required");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    const auto path = "/agents/" + std::to_string(i);
    if (!(s.agents[i].metric == s.metric)) throw ValidationError(path, "agent metric differs from the scenario metric");
    try {
      validate(s.agents[i]);
    } catch (const ValidationError& ex) {
      throw ex.under(path);
    }
    if (!ids.insert(s.agents[i].id).second)
      throw ValidationError(path + "/id", "duplicate agent id '" + s.agents[i].id + "'");
  }
  for (std::size_t i = 0; i < s.schedule.size(); ++i) {
    const auto& a = s.schedule[i];
    const auto path = "/schedule/" + std::to_string(i);
    if (a.tick >= s.run_ticks)
      throw ValidationError(path + "/tick", "scheduled tick " + std::to_string(a.tick) + " is outside [0, run_ticks=" +
                                                std::to_string(s.run_ticks) + ")");
    if (!ids.count(a.agent)) throw ValidationError(path + "/agent", "unknown agent '" + a.agent + "'");
    if (const auto* st = std::get_if<StimulusAction>(&a.action); st && st->point_or_label.empty())
      throw ValidationError(path, "empty stimulus");
  }
}

Scenario scenario_from_json(const json& doc) {
  Reader r(doc, "");
  r.allow_only({"metric", "agents", "schedule", "coupling", "run_ticks", "seed"});
  Scenario s;
  s.metric = parse_metric(r.at("metric"));
  s.run_ticks = r.unsigned_int("run_ticks");
  s.seed = r.unsigned_int("seed", 0);
  if (r.has("coupling")) {
    const auto c = r.string("coupling");
    if (c == "none") s.coupling = Coupling::None;
    else if (c == "broadcast") s.coupling = Coupling::Broadcast;
    else throw ValidationError("/coupling", "coupling must be 'none' or 'broadcast'");
  }
  const auto& agents = r.array("agents");
  if (agents.empty()) throw ValidationError("/agents", "at least one agent is required");
  for (std::size_t i = 0; i < agents.size(); ++i)
    s.agents.push_back(parse_agent(s.metric, agents[i], "/agents/" + std::to_string(i)));
  if (r.has("schedule")) {
    const auto& sched = r.array("schedule");
    for (std::size_t i = 0; i < sched.size(); ++i)
      s.schedule.push_back(parse_action(sched[i], "/schedule/" + std::to_string(i)));
  }
  std::stable_sort(s.schedule.begin(), s.schedule.end(),
                   [](const ScheduledAction& x, const ScheduledAction& y) { return x.tick < y.tick; });
  reseed(s, s.seed);
  validate(s);
  return s;
}

Scenario load_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& ex) {
    const auto [line, col] = line_and_column(text, ex.byte);
    std::string what = ex.what();
    if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw ParseError(line, col, what);
  }
  return scenario_from_json(doc);
}

ordered_json to_json(const Thresholds& th) {
  ordered_json j;
  j["realization"] = th.realization;
  j["preserving"] = th.preserving;
  j["max_interest"] = th.max_interest;
  j["max_interdiction"] = th.max_interdiction;
  return j;
}

ordered_json to_json(const EmotionProfile& profile) {
  ordered_json j;
  j["a"] = profile.a;
  j["b"] = profile.b;
  return j;
}

ordered_json to_json(const Scenario& s) {
  ordered_json doc;
  doc["metric"] = {{"kind", to_string(s.metric.kind())}, {"p", s.metric.p()}, {"m", s.metric.m()}};
  doc["run_ticks"] = s.run_ticks;
  doc["seed"] = s.seed;
  doc["coupling"] = s.coupling == Coupling::Broadcast ? "broadcast" : "none";
  ordered_json agents = ordered_json::array();
  for (const auto& a : s.agents) {
    ordered_json ja;
    ja["id"] = a.id;
    ja["model_level"] = a.model_level;
    ordered_json procs = ordered_json::array();
    for (const auto& p : a.processors) {
      ordered_json jp;
      jp["id"] = p.id;
      std::visit(
          [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, MonomialMap>) {
              jp["map"] = {{"type", "monomial"}, {"n", m.n}};
            } else if constexpr (std::is_same_v<T, AffineMap>) {
              jp["map"] = {{"type", "affine"}, {"a", m.a}, {"b", m.b}};
            } else {
              ordered_json rules = ordered_json::array();
              for (const auto& rule : m.rules)
                rules.push_back({{"from", rule.from.to_string()}, {"to", rule.to.to_string()}});
              jp["map"] = {{"type", "prefix_rewrite"}, {"rules", rules}};
            }
          },
          p.map);
      jp["output"] = to_string(p.output_target);
      if (p.blocking_threshold) jp["blocking_threshold"] = *p.blocking_threshold;
      jp["max_steps"] = p.max_steps;
      procs.push_back(std::move(jp));
    }
    ja["processors"] = std::move(procs);
    ordered_json routing = ordered_json::array();
    for (const auto& rule : a.routing)
      routing.push_back({{"prefix", rule.prefix.to_string()}, {"processor", rule.processor}});
    ja["routing"] = std::move(routing);
    ja["interest_db"] = point_list(a.interest_db);
    ja["interdiction_db"] = point_list(a.interdiction_db);
    ja["thresholds"] = to_json(a.thresholds);
    ja["profile"] = to_json(a.profile);
    ja["collector"] = {{"capacity", a.collector.capacity},
                       {"half_life_ticks", a.collector.half_life_ticks},
                       {"realizations_per_tick", a.collector.realizations_per_tick}};
    ja["unconscious"] = {{"leak_rate", a.unconscious.leak_rate}, {"retry_attempts", a.unconscious.retry_attempts}};
    ja["learning"] = a.learning;
    agents.push_back(std::move(ja));
  }
  doc["agents"] = std::move(agents);
  ordered_json sched = ordered_json::array();
  for (const auto& a : s.schedule) {
    ordered_json ja;
    ja["tick"] = a.tick;
    ja["agent"] = a.agent;
    if (const auto* st = std::get_if<StimulusAction>(&a.action)) ja["stimulus"] = st->point_or_label;
    else ja["patch"] = to_json(std::get<PatchAction>(a.action).patch);
    sched.push_back(std::move(ja));
  }
  doc["schedule"] = std::move(sched);
  return doc;
}

ordered_json to_json(const AgentSnapshot& s) {
  ordered_json j;
  j["agent"] = s.agent;
  j["model_level"] = s.model_level;
  j["tick"] = s.tick;
  ordered_json queue = ordered_json::array();
  for (const auto& q : s.queue)
    queue.push_back({{"idea", q.idea}, {"point", q.point}, {"score", q.score}, {"pinned", q.pinned},
                     {"enqueued_tick", q.enqueued_tick}, {"age", q.age}});
  j["queue"] = std::move(queue);
  j["databases"] = {{"interest", s.interest_db}, {"interdiction", s.interdiction_db}, {"hidden_wishes", s.hidden_db}};
  ordered_json repressed = ordered_json::array();
  for (const auto& w : s.repressed)
    repressed.push_back({{"idea", w.idea}, {"point", w.point}, {"repressed_tick", w.repressed_tick},
                         {"leak_count", w.leak_count}, {"age", w.age}});
  j["repressed"] = std::move(repressed);
  j["thresholds"] = to_json(s.thresholds);
  j["profile"] = to_json(s.profile);
  j["metrics"] = {{"realizations", s.metrics.realizations}, {"symptoms", s.metrics.symptoms},
                  {"repressions", s.metrics.repressions},   {"blocks", s.metrics.blocks},
                  {"purges", s.metrics.purges},             {"no_solutions", s.metrics.no_solutions},
                  {"discards", s.metrics.discards},         {"mean_pleasure", s.metrics.mean_pleasure()}};
  j["pending"] = s.pending;
  return j;
}

} // namespace psychot
