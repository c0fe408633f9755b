#pragma once

#include <memory>
#include <string>

#include "psychot/service.hpp"

namespace httplib {
class Server;
}

namespace psychot {

// JSON-over-HTTP protocol for sessions:
//
//   POST /sessions                       body: scenario document
//   POST /sessions/{id}/stimuli          {"agent", "stimulus" | "point" | "label"}
//   POST /sessions/{id}/advance          {"ticks", "cursor"?}
//   GET  /sessions/{id}/state
//   GET  /sessions/{id}/events?cursor=&limit=&wait_ms=   (long poll)
//   POST /sessions/{id}/thresholds       {"agent", "thresholds"?, "profile"?}
//   POST /sessions/{id}/end              {"persist"?}
//
// Errors: {"error": {"code", "message", "path"?, "line"?, "column"?}} with
// 400 (validation/parse), 404 (unknown), 409 (busy), 410 (ended).
void install_routes(httplib::Server& server, SessionManager& sessions);

class HttpService {
public:
  explicit HttpService(std::shared_ptr<SessionManager> sessions);
  ~HttpService();

  // Binds to host:port (port 0 picks a free one) and serves on a
  // background thread. Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Serves on the calling thread until stop().
  bool listen(const std::string& host, int port);
  void stop();

private:
  std::shared_ptr<SessionManager> sessions_;
  std::unique_ptr<httplib::Server> server_;
  struct Worker;
  std::unique_ptr<Worker> worker_;
};

} // namespace psychot
