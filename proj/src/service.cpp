#include "psychot/service.hpp"

#include <fstream>
#include <sstream>

namespace psychot {

using nlohmann::ordered_json;

std::string_view to_string(SessionStatus s) noexcept {
  switch (s) {
  case SessionStatus::Ready: return "ready";
  case SessionStatus::Running: return "running";
  case SessionStatus::Ended: return "ended";
  }
  return "unknown";
}

class Session::MutationGuard {
public:
  explicit MutationGuard(Session& s) : s_(s) {
    bool expected = false;
    if (!s_.busy_.compare_exchange_strong(expected, true))
      throw SessionError(SessionError::Code::Busy, "session " + s_.id_ + " is busy with another mutation");
    std::shared_lock lock(s_.mu_);
    if (s_.status_ == SessionStatus::Ended) {
      s_.busy_ = false;
      throw SessionError(SessionError::Code::Ended, "session " + s_.id_ + " has ended");
    }
  }
  ~MutationGuard() { s_.busy_ = false; }
  MutationGuard(const MutationGuard&) = delete;
  MutationGuard& operator=(const MutationGuard&) = delete;

private:
  Session& s_;
};

Session::Session(std::string id, Scenario scenario)
    : id_(std::move(id)), scenario_(std::move(scenario)), society_(scenario_),
      schedule_(schedule_in_order(scenario_)) {}

void Session::append(std::vector<Event> events) {
  log_.insert(log_.end(), std::make_move_iterator(events.begin()), std::make_move_iterator(events.end()));
}

Injected Session::post_stimulus(const std::string& agent, const std::string& text, StimulusForm form) {
  MutationGuard guard(*this);
  std::unique_lock lock(mu_);
  const auto i = society_.find(agent);
  if (i == society_.size()) throw SessionError(SessionError::Code::NotFound, "unknown agent '" + agent + "'");
  auto& a = society_.agent(i);
  switch (form) {
  case StimulusForm::Point: return a.inject_stimulus(a.config().metric.parse(text));
  case StimulusForm::Label:
    if (text.empty()) throw InvalidPoint("empty label");
    return a.inject_stimulus(encode_label(a.config().metric, text));
  case StimulusForm::Auto: break;
  }
  return a.inject(text);
}

EventPage Session::advance(std::uint64_t n, std::optional<std::uint64_t> cursor) {
  MutationGuard guard(*this);
  std::uint64_t from = 0;
  {
    std::unique_lock lock(mu_);
    from = cursor.value_or(log_.size());
    if (from > log_.size()) throw SessionError(SessionError::Code::BadRequest, "cursor beyond end of log");
    status_ = SessionStatus::Running;
  }
  try {
    for (std::uint64_t t = 0; t < n; ++t) {
      std::unique_lock lock(mu_);
      while (next_action_ < schedule_.size() && schedule_[next_action_].tick == society_.current_tick())
        society_.apply(schedule_[next_action_++]);
      append(society_.step(true));
      lock.unlock();
      cv_.notify_all();
    }
  } catch (...) {
    std::unique_lock lock(mu_);
    status_ = SessionStatus::Ready;
    throw;
  }
  std::unique_lock lock(mu_);
  status_ = SessionStatus::Ready;
  EventPage page;
  page.events.assign(log_.begin() + static_cast<std::ptrdiff_t>(from), log_.end());
  page.cursor = log_.size();
  page.status = status_;
  return page;
}

void Session::set_thresholds(const std::string& agent, const ConfigPatch& patch) {
  MutationGuard guard(*this);
  std::unique_lock lock(mu_);
  const auto i = society_.find(agent);
  if (i == society_.size()) throw SessionError(SessionError::Code::NotFound, "unknown agent '" + agent + "'");
  if (patch.empty()) throw ValidationError("", "patch changes nothing");
  society_.agent(i).apply_patch(patch);
}

void Session::end(const std::optional<std::filesystem::path>& log_path) {
  MutationGuard guard(*this);
  {
    std::unique_lock lock(mu_);
    append(society_.drain());
    status_ = SessionStatus::Ended;
  }
  cv_.notify_all();
  if (log_path) {
    std::ofstream out(*log_path);
    out << log_text();
    if (!out) throw Error("cannot write session log to " + log_path->string());
  }
}

SessionState Session::state() const {
  std::shared_lock lock(mu_);
  return SessionState{id_, society_.current_tick(), status_, society_.snapshots()};
}

EventPage Session::events_since(std::uint64_t cursor, std::size_t limit, std::chrono::milliseconds wait) const {
  std::shared_lock lock(mu_);
  if (cursor > log_.size()) throw SessionError(SessionError::Code::BadRequest, "cursor beyond end of log");
  if (wait.count() > 0)
    cv_.wait_for(lock, wait, [&] { return log_.size() > cursor || status_ == SessionStatus::Ended; });
  EventPage page;
  const auto end = std::min<std::uint64_t>(log_.size(), cursor + limit);
  page.events.assign(log_.begin() + static_cast<std::ptrdiff_t>(cursor),
                     log_.begin() + static_cast<std::ptrdiff_t>(end));
  page.cursor = end;
  page.status = status_;
  return page;
}

std::uint64_t Session::log_size() const {
  std::shared_lock lock(mu_);
  return log_.size();
}

std::string Session::log_text() const {
  std::shared_lock lock(mu_);
  std::ostringstream out;
  out << format_header(society_.agent_ids()) << '\n';
  for (const auto& e : log_) out << format_event(e) << '\n';
  out << format_footer(society_.current_tick(), status_ == SessionStatus::Ended) << '\n';
  return out.str();
}

std::string SessionManager::create(std::string_view scenario_doc) {
  auto scenario = load_scenario(scenario_doc);
  std::lock_guard lock(mu_);
  auto id = "s" + std::to_string(next_id_++);
  sessions_.emplace(id, std::make_shared<Session>(id, std::move(scenario)));
  return id;
}

std::shared_ptr<Session> SessionManager::get(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionError(SessionError::Code::NotFound, "unknown session '" + id + "'");
  return it->second;
}

std::optional<std::filesystem::path> SessionManager::end(const std::string& id, bool persist) {
  auto session = get(id);
  std::optional<std::filesystem::path> path;
  if (persist && log_dir_) path = *log_dir_ / (id + ".log");
  session->end(path);
  return path;
}

std::vector<std::string> SessionManager::ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

ordered_json to_json(const SessionState& state) {
  ordered_json j;
  j["session_id"] = state.session_id;
  j["tick"] = state.tick;
  j["status"] = to_string(state.status);
  ordered_json agents = ordered_json::array();
  for (const auto& a : state.agents) agents.push_back(to_json(a));
  j["agents"] = std::move(agents);
  return j;
}

ordered_json to_json(const EventPage& page) {
  ordered_json j;
  ordered_json events = ordered_json::array();
  for (const auto& e : page.events) events.push_back(to_json(e));
  j["events"] = std::move(events);
  j["cursor"] = page.cursor;
  j["status"] = to_string(page.status);
  return j;
}

} // namespace psychot
