#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "psychot/collector.hpp"

namespace psychot {

enum class EventKind {
  StimulusEncoded,
  Dispatched,
  AttractorFound,
  NoSolution,
  ReDispatch,
  UnconsciousPerformance,
  Blocked,
  Queued,
  Discarded,
  Purged,
  Repressed,
  Leaked,
  Realized,
  Symptom,
  ConfigChanged,
};

std::string_view to_string(EventKind kind) noexcept;
std::optional<EventKind> event_kind_from_string(std::string_view s) noexcept;

// Analyzer measures attached to an event. `unconscious` is the
// hidden-wish interdiction computed by the resistance check.
struct Measures {
  std::optional<double> interest{};
  std::optional<double> interdiction{};
  std::optional<double> score{};
  std::optional<double> pleasure{};
  std::optional<double> unconscious{};

  friend bool operator==(const Measures&, const Measures&) = default;
};

// A partial update of an agent's thresholds and emotion profile.
struct ConfigPatch {
  std::optional<double> realization;
  std::optional<double> preserving;
  std::optional<double> max_interest;
  std::optional<double> max_interdiction;
  std::optional<double> a;
  std::optional<double> b;

  bool empty() const noexcept {
    return !realization && !preserving && !max_interest && !max_interdiction && !a && !b;
  }
  friend bool operator==(const ConfigPatch&, const ConfigPatch&) = default;
};

struct Event {
  Tick tick = 0;
  std::string agent;
  std::uint64_t seq = 0; // per agent, starting at 0
  EventKind kind = EventKind::StimulusEncoded;
  std::optional<IdeaId> idea;
  std::optional<std::string> point;
  std::optional<std::string> processor;
  std::optional<IdeaId> root_wish;
  std::optional<Measures> measures;
  std::optional<std::string> detail;
  std::optional<ConfigPatch> patch;

  friend bool operator==(const Event&, const Event&) = default;
};

} // namespace psychot
