#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "psychot/event.hpp"

namespace psychot {

// Line-delimited log. The first line is a header naming the agents; event
// lines follow in (tick, agent order, seq) order; a footer closes the run.
//
//   {"format":"psychot-log","version":1,"agents":["a","b"]}
//   {"tick":0,"agent":"a","seq":0,"kind":"StimulusEncoded",...}
//   {"end":true,"ticks":10}
inline constexpr std::string_view kLogFormat = "psychot-log";
inline constexpr int kLogVersion = 1;

nlohmann::ordered_json to_json(const Event& e);
Event event_from_json(const nlohmann::json& j); // throws Error

nlohmann::ordered_json to_json(const ConfigPatch& p);
ConfigPatch config_patch_from_json(const nlohmann::json& j, const std::string& path = ""); // throws ValidationError

std::string format_event(const Event& e);
std::string format_header(const std::vector<std::string>& agents);
std::string format_footer(Tick ticks, bool complete = true);

struct ParsedLog {
  std::vector<std::string> agents;
  std::vector<Event> events;
  std::optional<Tick> ticks; // from the footer, when present
};

// Throws ParseError addressed by line number on a malformed line.
ParsedLog parse_log(std::istream& in);

} // namespace psychot
