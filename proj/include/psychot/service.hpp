#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "psychot/simulation.hpp"

namespace psychot {

enum class SessionStatus { Ready, Running, Ended };
std::string_view to_string(SessionStatus s) noexcept;

class SessionError : public Error {
public:
  enum class Code { NotFound, Busy, Ended, BadRequest };
  SessionError(Code code, const std::string& what) : Error(what), code_(code) {}
  Code code() const noexcept { return code_; }

private:
  Code code_;
};

struct EventPage {
  std::vector<Event> events;
  std::uint64_t cursor = 0; // index just past the last returned event
  SessionStatus status = SessionStatus::Ready;
};

struct SessionState {
  std::string session_id;
  Tick tick = 0;
  SessionStatus status = SessionStatus::Ready;
  std::vector<AgentSnapshot> agents;
};

// A live society driven interactively. Mutations (stimuli, advance, patches,
// end) are serialized: a mutation arriving while another is in flight is
// refused with SessionError::Busy rather than queued. Reads take a shared
// lock and observe whole ticks only.
class Session {
public:
  Session(std::string id, Scenario scenario);

  const std::string& id() const noexcept { return id_; }
  const Scenario& scenario() const noexcept { return scenario_; }

  enum class StimulusForm { Auto, Point, Label };
  // Auto takes a valid point literal verbatim and hashes anything else.
  Injected post_stimulus(const std::string& agent, const std::string& text, StimulusForm form = StimulusForm::Auto);
  // Runs n ticks and returns the events after `cursor` (default: the log
  // length when the call started).
  EventPage advance(std::uint64_t n, std::optional<std::uint64_t> cursor = std::nullopt);
  void set_thresholds(const std::string& agent, const ConfigPatch& patch);
  // Ends the session; writes the full log when `log_path` is given.
  void end(const std::optional<std::filesystem::path>& log_path = std::nullopt);

  SessionState state() const;
  // Events from `cursor` on, at most `limit`. Blocks up to `wait` for new
  // events when none are available (long poll).
  EventPage events_since(std::uint64_t cursor, std::size_t limit = 1000,
                         std::chrono::milliseconds wait = std::chrono::milliseconds{0}) const;
  std::uint64_t log_size() const;

  // Header, merged events and footer, as the run command writes them.
  std::string log_text() const;

private:
  class MutationGuard;

  void append(std::vector<Event> events);

  std::string id_;
  Scenario scenario_;
  mutable std::shared_mutex mu_;
  mutable std::condition_variable_any cv_;
  std::atomic<bool> busy_{false};
  Society society_;
  // Scheduled actions in the scenario fire as the session reaches their tick.
  std::vector<ScheduledAction> schedule_;
  std::size_t next_action_ = 0;
  std::vector<Event> log_;
  SessionStatus status_ = SessionStatus::Ready;
};

class SessionManager {
public:
  // Sessions that end with persistence write LOG files here when set.
  explicit SessionManager(std::optional<std::filesystem::path> log_dir = std::nullopt)
      : log_dir_(std::move(log_dir)) {}

  // Throws ParseError / ValidationError exactly as load_scenario does.
  std::string create(std::string_view scenario_doc);
  std::shared_ptr<Session> get(const std::string& id) const;
  // Returns the persisted log path, if any.
  std::optional<std::filesystem::path> end(const std::string& id, bool persist);
  std::vector<std::string> ids() const;

private:
  std::optional<std::filesystem::path> log_dir_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

nlohmann::ordered_json to_json(const SessionState& state);
nlohmann::ordered_json to_json(const EventPage& page);

} // namespace psychot
