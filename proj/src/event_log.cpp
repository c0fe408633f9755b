#include "psychot/event_log.hpp"

#include <array>
#include <istream>

#include "psychot/error.hpp"

namespace psychot {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::array<std::string_view, 15> kKindNames = {
    "StimulusEncoded", "Dispatched", "AttractorFound", "NoSolution", "ReDispatch",
    "UnconsciousPerformance", "Blocked", "Queued", "Discarded", "Purged",
    "Repressed", "Leaked", "Realized", "Symptom", "ConfigChanged",
};

template <class T>
void put(ordered_json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
std::optional<T> get(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

} // namespace

std::string_view to_string(EventKind kind) noexcept {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<EventKind> event_kind_from_string(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == s) return static_cast<EventKind>(i);
  return std::nullopt;
}

ordered_json to_json(const ConfigPatch& p) {
  ordered_json j = ordered_json::object();
  put(j, "realization", p.realization);
  put(j, "preserving", p.preserving);
  put(j, "max_interest", p.max_interest);
  put(j, "max_interdiction", p.max_interdiction);
  put(j, "a", p.a);
  put(j, "b", p.b);
  return j;
}

ConfigPatch config_patch_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, "patch must be an object");
  ConfigPatch p;
  auto number = [&](const json& obj, const char* key, const std::string& at) -> std::optional<double> {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw ValidationError(at + "/" + key, "expected a number");
    return it->get<double>();
  };
  // Accept both the flat form and {"thresholds": {...}, "profile": {...}}.
  const json* th = &j;
  const json* pr = &j;
  std::string th_path = path, pr_path = path;
  if (auto it = j.find("thresholds"); it != j.end()) {
    th = &*it;
    th_path += "/thresholds";
  }
  if (auto it = j.find("profile"); it != j.end()) {
    pr = &*it;
    pr_path += "/profile";
  }
  if (!th->is_object()) throw ValidationError(th_path, "expected an object");
  if (!pr->is_object()) throw ValidationError(pr_path, "expected an object");
  constexpr std::array<std::string_view, 4> kThresholdKeys = {
      "realization", "preserving", "max_interest", "max_interdiction"};
  constexpr std::array<std::string_view, 2> kProfileKeys = {"a", "b"};
  auto allowed = [](const auto& keys, std::string_view k) {
    for (auto key : keys)
      if (key == k) return true;
    return false;
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    bool ok = (k == "thresholds" && th != &j) || (k == "profile" && pr != &j) ||
              (th == &j && allowed(kThresholdKeys, k)) || (pr == &j && allowed(kProfileKeys, k));
    if (!ok) throw ValidationError(path + "/" + k, "unknown field");
  }
  if (th != &j)
    for (auto it = th->begin(); it != th->end(); ++it)
      if (!allowed(kThresholdKeys, it.key())) throw ValidationError(th_path + "/" + it.key(), "unknown field");
  if (pr != &j)
    for (auto it = pr->begin(); it != pr->end(); ++it)
      if (!allowed(kProfileKeys, it.key())) throw ValidationError(pr_path + "/" + it.key(), "unknown field");
  p.realization = number(*th, "realization", th_path);
  p.preserving = number(*th, "preserving", th_path);
  p.max_interest = number(*th, "max_interest", th_path);
  p.max_interdiction = number(*th, "max_interdiction", th_path);
  p.a = number(*pr, "a", pr_path);
  p.b = number(*pr, "b", pr_path);
  if (p.empty()) throw ValidationError(path, "patch changes nothing");
  return p;
}

ordered_json to_json(const Event& e) {
  ordered_json j;
  j["tick"] = e.tick;
  j["agent"] = e.agent;
  j["seq"] = e.seq;
  j["kind"] = to_string(e.kind);
  put(j, "idea", e.idea);
  put(j, "point", e.point);
  put(j, "processor", e.processor);
  put(j, "root_wish", e.root_wish);
  if (e.measures) {
    ordered_json m = ordered_json::object();
    put(m, "interest", e.measures->interest);
    put(m, "interdiction", e.measures->interdiction);
    put(m, "score", e.measures->score);
    put(m, "pleasure", e.measures->pleasure);
    put(m, "unconscious", e.measures->unconscious);
    j["measures"] = std::move(m);
  }
  put(j, "detail", e.detail);
  if (e.patch) j["patch"] = to_json(*e.patch);
  return j;
}

Event event_from_json(const json& j) {
  if (!j.is_object()) throw Error("event record must be an object");
  Event e;
  try {
    e.tick = j.at("tick").get<Tick>();
    e.agent = j.at("agent").get<std::string>();
    e.seq = j.at("seq").get<std::uint64_t>();
    const auto kind_name = j.at("kind").get<std::string>();
    const auto kind = event_kind_from_string(kind_name);
    if (!kind) throw Error("unknown event kind '" + kind_name + "'");
    e.kind = *kind;
    e.idea = get<IdeaId>(j, "idea");
    e.point = get<std::string>(j, "point");
    e.processor = get<std::string>(j, "processor");
    e.root_wish = get<IdeaId>(j, "root_wish");
    if (auto it = j.find("measures"); it != j.end()) {
      Measures m;
      m.interest = get<double>(*it, "interest");
      m.interdiction = get<double>(*it, "interdiction");
      m.score = get<double>(*it, "score");
      m.pleasure = get<double>(*it, "pleasure");
      m.unconscious = get<double>(*it, "unconscious");
      e.measures = m;
    }
    e.detail = get<std::string>(j, "detail");
    if (auto it = j.find("patch"); it != j.end()) e.patch = config_patch_from_json(*it, "/patch");
  } catch (const json::exception& ex) {
    throw Error(std::string("malformed event record: ") + ex.what());
  }
  return e;
}

std::string format_event(const Event& e) { return to_json(e).dump(); }

std::string format_header(const std::vector<std::string>& agents) {
  ordered_json j;
  j["format"] = kLogFormat;
  j["version"] = kLogVersion;
  j["agents"] = agents;
  return j.dump();
}

std::string format_footer(Tick ticks, bool complete) {
  ordered_json j;
  j["end"] = complete;
  j["ticks"] = ticks;
  return j.dump();
}

ParsedLog parse_log(std::istream& in) {
  ParsedLog log;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  bool have_footer = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (have_footer) throw ParseError(lineno, 1, "record after end-of-run footer");
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& ex) {
      throw ParseError(lineno, ex.byte, "invalid JSON record");
    }
    if (!have_header) {
      if (!j.is_object() || j.value("format", "") != kLogFormat)
        throw ParseError(lineno, 1, "missing psychot-log header");
      if (j.value("version", 0) != kLogVersion) throw ParseError(lineno, 1, "unsupported log version");
      log.agents = j.at("agents").get<std::vector<std::string>>();
      have_header = true;
      continue;
    }
    if (j.is_object() && j.contains("end")) {
      log.ticks = j.at("ticks").get<Tick>();
      have_footer = true;
      continue;
    }
    try {
      log.events.push_back(event_from_json(j));
    } catch (const Error& ex) {
      throw ParseError(lineno, 1, ex.what());
    }
  }
  if (!have_header) throw ParseError(lineno + 1, 1, "empty log: missing header");
  return log;
}

} // namespace psychot
