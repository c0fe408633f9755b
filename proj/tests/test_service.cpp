#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "psychot/http_api.hpp"
#include "psychot/simulation.hpp"
#include "support.hpp"

using namespace psychot;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string symptom_doc() { return test::read_text(test::fixture_path("scenarios/symptom.json")); }
std::string reduction_doc() { return test::read_text(test::fixture_path("scenarios/reduction.json")); }

ConfigPatch maxima(double v) {
  ConfigPatch p;
  p.max_interest = v;
  p.max_interdiction = v;
  return p;
}

std::size_t count_kind(const std::vector<Event>& events, EventKind kind) {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [&](const Event& e) { return e.kind == kind; }));
}

// Plays a protocol transcript against a live server. With
// PSYCHOT_RECORD_PROTOCOL=1 the observed responses are written back instead.
void play_transcript(const std::string& name) {
  const auto path = test::fixture_path("protocol/" + name);
  auto doc = ordered_json::parse(test::read_text(path));
  const bool record = std::getenv("PSYCHOT_RECORD_PROTOCOL") != nullptr;

  HttpService service(std::make_shared<SessionManager>());
  const int port = service.start();
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(10, 0);

  for (auto& exchange : doc["exchanges"]) {
    const auto& req = exchange["request"];
    const auto method = req["method"].get<std::string>();
    const auto target = req["path"].get<std::string>();
    CAPTURE(method);
    CAPTURE(target);
    httplib::Result res;
    if (method == "GET") {
      res = client.Get(target);
    } else {
      const auto body = req.contains("raw_body") ? req["raw_body"].get<std::string>()
                                                 : (req.contains("body") ? req["body"].dump() : std::string());
      res = client.Post(target, body, "application/json");
    }
    REQUIRE(res);
    const auto got = ordered_json::parse(res->body);
    if (record) {
      exchange["response"] = ordered_json{{"status", res->status}, {"body", got}};
      continue;
    }
    const auto& want = exchange["response"];
    CHECK(res->status == want["status"].get<int>());
    CHECK(json(got) == json(want["body"]));
  }
  service.stop();
  if (record) {
    std::ofstream out(path);
    out << doc.dump(2) << '\n';
  }
}

} // namespace

TEST_CASE("sessions are created with distinct ids and mirror scenario errors") {
  SessionManager m;
  const auto a = m.create(symptom_doc());
  const auto b = m.create(symptom_doc());
  CHECK(a == "s1");
  CHECK(b == "s2");
  CHECK(m.get(a)->state().tick == 0);
  CHECK(m.get(a)->state().status == SessionStatus::Ready);
  CHECK_THROWS_AS(m.create("{"), ParseError);
  CHECK_THROWS_AS(m.create("{\"metric\":{\"p\":2,\"m\":3},\"run_ticks\":1,\"agents\":[]}"), ValidationError);
  try {
    m.get("s9");
    FAIL("expected not found");
  } catch (const SessionError& ex) {
    CHECK(ex.code() == SessionError::Code::NotFound);
  }
}

TEST_CASE("stimuli echo their encoded point and are refused after the end") {
  SessionManager m;
  auto s = m.get(m.create(symptom_doc()));
  CHECK(s->post_stimulus("patient", "010").point.to_string() == "010");
  const auto label = s->post_stimulus("patient", "a locked drawer", Session::StimulusForm::Label);
  CHECK(label.point == encode_label(MetricSpec(MetricKind::PrefixUltrametric, 2, 3), "a locked drawer"));
  CHECK_THROWS_AS(s->post_stimulus("patient", "012", Session::StimulusForm::Point), InvalidPoint);
  CHECK_THROWS_AS(s->post_stimulus("nobody", "010"), SessionError);
  m.end("s1", false);
  try {
    s->post_stimulus("patient", "010");
    FAIL("expected ended");
  } catch (const SessionError& ex) {
    CHECK(ex.code() == SessionError::Code::Ended);
  }
  CHECK(s->state().status == SessionStatus::Ended);
}

TEST_CASE("advance(0) adds nothing; split advances equal one combined advance") {
  SessionManager m;
  auto one = m.get(m.create(reduction_doc()));
  auto two = m.get(m.create(reduction_doc()));
  CHECK(one->advance(0).events.empty());
  one->advance(17);
  two->advance(5);
  two->advance(0);
  two->advance(12);
  CHECK(one->log_text() == two->log_text());
  CHECK(one->state().tick == 17);
}

TEST_CASE("threshold patches take effect from the next tick and are logged") {
  SessionManager m;
  auto s = m.get(m.create(symptom_doc()));
  CHECK_THROWS_AS(s->set_thresholds("patient", ConfigPatch{0.5, 0.5, {}, {}, {}, {}}), ValidationError);
  CHECK_THROWS_AS(s->set_thresholds("patient", ConfigPatch{}), ValidationError);
  const auto first = s->advance(1);
  CHECK(count_kind(first.events, EventKind::Repressed) == 1);
  s->set_thresholds("patient", maxima(1.5));
  s->post_stimulus("patient", "100");
  const auto later = s->advance(5);
  CHECK(count_kind(later.events, EventKind::ConfigChanged) == 1);
  CHECK(count_kind(later.events, EventKind::Repressed) == 0);
  CHECK(later.events.front().kind == EventKind::ConfigChanged);
}

TEST_CASE("cursors page through the log without gaps or duplicates") {
  SessionManager m;
  auto s = m.get(m.create(reduction_doc()));
  s->advance(30);
  std::vector<Event> paged;
  std::uint64_t cursor = 0;
  for (;;) {
    auto page = s->events_since(cursor, 7);
    if (page.events.empty()) break;
    CHECK(page.cursor == cursor + page.events.size());
    paged.insert(paged.end(), page.events.begin(), page.events.end());
    cursor = page.cursor;
  }
  CHECK(paged == s->events_since(0, 1u << 20).events);
  CHECK(cursor == s->log_size());
  CHECK_THROWS_AS(s->events_since(s->log_size() + 1), SessionError);
  CHECK_THROWS_AS(s->advance(1, s->log_size() + 1), SessionError);
}

TEST_CASE("a second simultaneous mutation is refused, not queued") {
  SessionManager m;
  auto s = m.get(m.create(reduction_doc()));
  for (std::uint64_t n = 200000;; n *= 4) {
    std::atomic<bool> done{false};
    std::thread worker([&] {
      s->advance(n);
      done = true;
    });
    bool saw_running = false;
    while (!done && !saw_running) saw_running = s->state().status == SessionStatus::Running;
    if (saw_running) {
      const auto tick_before = s->state().tick;
      try {
        s->advance(1);
        FAIL("advance during advance must be refused");
      } catch (const SessionError& ex) {
        CHECK(ex.code() == SessionError::Code::Busy);
      }
      CHECK_THROWS_AS(s->set_thresholds("subject", maxima(1.2)), SessionError);
      CHECK_THROWS_AS(s->post_stimulus("subject", "0000"), SessionError);
      CHECK(s->state().tick >= tick_before);
    }
    worker.join();
    if (saw_running) break;
  }
  CHECK(s->state().status == SessionStatus::Ready);
  CHECK_NOTHROW(s->advance(1));
}

TEST_CASE("long poll wakes when new events arrive") {
  SessionManager m;
  auto s = m.get(m.create(symptom_doc()));
  const auto cursor = s->log_size();
  EventPage page;
  std::thread reader([&] { page = s->events_since(cursor, 100, std::chrono::seconds(10)); });
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  const auto t0 = std::chrono::steady_clock::now();
  s->advance(1);
  reader.join();
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(5));
  CHECK_FALSE(page.events.empty());
  CHECK(page.events.front().kind == EventKind::StimulusEncoded);

  // A timed-out poll returns an empty page at the same cursor.
  const auto idle = s->events_since(s->log_size(), 100, std::chrono::milliseconds(20));
  CHECK(idle.events.empty());
  CHECK(idle.cursor == s->log_size());
}

TEST_CASE("ended sessions persist a log that analyzes cleanly") {
  const auto dir = std::filesystem::temp_directory_path() / "psychot_service_test";
  std::filesystem::create_directories(dir);
  SessionManager m(dir);
  const auto id = m.create(symptom_doc());
  auto s = m.get(id);
  s->advance(4);
  const auto path = m.end(id, true);
  REQUIRE(path);
  const auto text = test::read_text(path->string());
  CHECK(text == s->log_text());
  std::istringstream in(text);
  const auto report = analyze(in);
  CHECK(report.ticks == 4);
  CHECK(report.agents.at(0).counts.symptoms == 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("protocol transcript: symptom session") { play_transcript("symptom_session.json"); }

TEST_CASE("protocol transcript: error responses") { play_transcript("errors.json"); }

TEST_CASE("concurrent HTTP advances: one is refused with 409") {
  HttpService service(std::make_shared<SessionManager>());
  const int port = service.start();
  httplib::Client setup("127.0.0.1", port);
  auto created = setup.Post("/sessions", reduction_doc(), "application/json");
  REQUIRE(created);
  REQUIRE(created->status == 201);
  for (int n = 200000;; n *= 4) {
    int first_status = 0;
    std::thread worker([&] {
      httplib::Client c("127.0.0.1", port);
      c.set_read_timeout(60, 0);
      auto r = c.Post("/sessions/s1/advance", "{\"ticks\":" + std::to_string(n) + "}", "application/json");
      first_status = r ? r->status : -1;
    });
    httplib::Client c("127.0.0.1", port);
    bool saw_running = false;
    for (int i = 0; i < 100000 && !saw_running; ++i) {
      auto st = c.Get("/sessions/s1/state");
      saw_running = st && json::parse(st->body)["status"] == "running";
      if (!saw_running && first_status != 0) break;
    }
    int second_status = 0;
    if (saw_running) {
      auto r = c.Post("/sessions/s1/advance", "{\"ticks\":1}", "application/json");
      REQUIRE(r);
      second_status = r->status;
    }
    worker.join();
    CHECK(first_status == 200);
    if (saw_running) {
      CHECK(second_status == 409);
      break;
    }
  }
  service.stop();
}
