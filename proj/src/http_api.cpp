#include "psychot/http_api.hpp"

#include <thread>

#include <httplib.h>

#include "psychot/event_log.hpp"

namespace psychot {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void reply(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  ordered_json err;
  err["code"] = code;
  err["message"] = message;
  reply(res, status, ordered_json{{"error", err}});
}

// Maps every domain exception to a protocol error.
template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const SessionError& ex) {
      switch (ex.code()) {
      case SessionError::Code::NotFound: reply_error(res, 404, "not_found", ex.what()); break;
      case SessionError::Code::Busy: reply_error(res, 409, "busy", ex.what()); break;
      case SessionError::Code::Ended: reply_error(res, 410, "ended", ex.what()); break;
      case SessionError::Code::BadRequest: reply_error(res, 400, "bad_request", ex.what()); break;
      }
    } catch (const ParseError& ex) {
      ordered_json err{{"code", "parse"}, {"message", ex.what()}, {"line", ex.line()}, {"column", ex.column()}};
      reply(res, 400, ordered_json{{"error", err}});
    } catch (const ValidationError& ex) {
      ordered_json err{{"code", "validation"}, {"message", ex.message()}, {"path", ex.path()}};
      reply(res, 400, ordered_json{{"error", err}});
    } catch (const InvalidPoint& ex) {
      reply_error(res, 400, "invalid_point", ex.what());
    } catch (const json::exception& ex) {
      reply_error(res, 400, "bad_request", ex.what());
    } catch (const std::exception& ex) {
      reply_error(res, 500, "internal", ex.what());
    }
  };
}

json body_object(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j;
  try {
    j = json::parse(req.body);
  } catch (const json::parse_error& ex) {
    throw ParseError(1, ex.byte, "request body is not valid JSON");
  }
  if (!j.is_object()) throw ValidationError("", "request body must be a JSON object");
  return j;
}

std::uint64_t query_u64(const httplib::Request& req, const char* key, std::uint64_t fallback) {
  if (!req.has_param(key)) return fallback;
  const auto v = req.get_param_value(key);
  try {
    std::size_t used = 0;
    const auto n = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw SessionError(SessionError::Code::BadRequest, std::string("query parameter '") + key + "' must be a non-negative integer");
  }
}

std::string required_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) throw ValidationError(std::string("/") + key, "expected a string");
  return it->get<std::string>();
}

} // namespace

void install_routes(httplib::Server& server, SessionManager& sessions) {
  server.Post("/sessions", guarded([&](const httplib::Request& req, httplib::Response& res) {
    const auto id = sessions.create(req.body);
    const auto state = sessions.get(id)->state();
    ordered_json body;
    body["session_id"] = id;
    body["tick"] = state.tick;
    body["status"] = to_string(state.status);
    ordered_json agents = ordered_json::array();
    for (const auto& a : state.agents) agents.push_back(a.agent);
    body["agents"] = std::move(agents);
    reply(res, 201, body);
  }));

  server.Post(R"(/sessions/([^/]+)/stimuli)", guarded([&](const httplib::Request& req, httplib::Response& res) {
    auto session = sessions.get(req.matches[1]);
    const auto body = body_object(req);
    const auto agent = required_string(body, "agent");
    Injected injected;
    if (body.contains("point"))
      injected = session->post_stimulus(agent, required_string(body, "point"), Session::StimulusForm::Point);
    else if (body.contains("label"))
      injected = session->post_stimulus(agent, required_string(body, "label"), Session::StimulusForm::Label);
    else
      injected = session->post_stimulus(agent, required_string(body, "stimulus"));
    ordered_json out;
    out["idea"] = injected.idea;
    out["point"] = injected.point.to_string();
    out["tick"] = session->state().tick;
    reply(res, 200, out);
  }));

  server.Post(R"(/sessions/([^/]+)/advance)", guarded([&](const httplib::Request& req, httplib::Response& res) {
    auto session = sessions.get(req.matches[1]);
    const auto body = body_object(req);
    std::uint64_t ticks = 1;
    if (auto it = body.find("ticks"); it != body.end()) {
      if (!it->is_number_unsigned()) throw ValidationError("/ticks", "expected a non-negative integer");
      ticks = it->get<std::uint64_t>();
    }
    std::optional<std::uint64_t> cursor;
    if (auto it = body.find("cursor"); it != body.end() && !it->is_null()) {
      if (!it->is_number_unsigned()) throw ValidationError("/cursor", "expected a non-negative integer");
      cursor = it->get<std::uint64_t>();
    }
    auto page = session->advance(ticks, cursor);
    auto out = to_json(page);
    out["tick"] = session->state().tick;
    reply(res, 200, out);
  }));

  server.Get(R"(/sessions/([^/]+)/state)", guarded([&](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, to_json(sessions.get(req.matches[1])->state()));
  }));

  server.Get(R"(/sessions/([^/]+)/events)", guarded([&](const httplib::Request& req, httplib::Response& res) {
    auto session = sessions.get(req.matches[1]);
    const auto cursor = query_u64(req, "cursor", 0);
    const auto limit = query_u64(req, "limit", 1000);
    const auto wait_ms = std::min<std::uint64_t>(query_u64(req, "wait_ms", 0), 30000);
    reply(res, 200,
          to_json(session->events_since(cursor, static_cast<std::size_t>(limit),
                                        std::chrono::milliseconds(static_cast<std::int64_t>(wait_ms)))));
  }));

  server.Post(R"(/sessions/([^/]+)/thresholds)", guarded([&](const httplib::Request& req, httplib::Response& res) {
    auto session = sessions.get(req.matches[1]);
    auto body = body_object(req);
    const auto agent = required_string(body, "agent");
    body.erase("agent");
    const auto patch = config_patch_from_json(body);
    session->set_thresholds(agent, patch);
    const auto state = session->state();
    ordered_json out;
    out["acknowledged"] = true;
    out["tick"] = state.tick;
    for (const auto& a : state.agents) {
      if (a.agent != agent) continue;
      out["thresholds"] = to_json(a.thresholds);
      out["profile"] = to_json(a.profile);
    }
    reply(res, 200, out);
  }));

  server.Post(R"(/sessions/([^/]+)/end)", guarded([&](const httplib::Request& req, httplib::Response& res) {
    const auto body = body_object(req);
    const bool persist = body.value("persist", false);
    const auto path = sessions.end(req.matches[1], persist);
    ordered_json out;
    out["status"] = "ended";
    out["log"] = path ? ordered_json(path->string()) : ordered_json(nullptr);
    reply(res, 200, out);
  }));
}

struct HttpService::Worker {
  std::thread thread;
};

HttpService::HttpService(std::shared_ptr<SessionManager> sessions)
    : sessions_(std::move(sessions)), server_(std::make_unique<httplib::Server>()) {
  install_routes(*server_, *sessions_);
}

HttpService::~HttpService() { stop(); }

int HttpService::start(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  worker_ = std::make_unique<Worker>();
  worker_->thread = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

bool HttpService::listen(const std::string& host, int port) { return server_->listen(host, port); }

void HttpService::stop() {
  if (server_) server_->stop();
  if (worker_ && worker_->thread.joinable()) worker_->thread.join();
  worker_.reset();
}

} // namespace psychot
