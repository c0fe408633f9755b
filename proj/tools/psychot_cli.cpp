// psychot: command-line front end.
//
//   psychot run --scenario FILE [--ticks N] [--seed S] --out LOG [--report FILE]
//   psychot analyze --log FILE [--report OUT]
//   psychot orbits --scenario FILE --processor ID [--agent ID]
//   psychot serve --port P [--host H] [--log-dir DIR]
//
// Exit codes: 0 success, 2 validation error, 3 runtime error.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "psychot/http_api.hpp"
#include "psychot/kernels.hpp"
#include "psychot/simulation.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

using nlohmann::ordered_json;

class IoError : public psychot::Error {
public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const ordered_json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("cannot write " + path);
}

int cmd_run(const std::string& scenario_path, std::optional<std::uint64_t> ticks, std::optional<std::uint64_t> seed,
            const std::string& out_path, const std::string& report_path, bool serial) {
  auto scenario = psychot::load_scenario(read_file(scenario_path));
  if (ticks) scenario.run_ticks = *ticks;
  if (seed) psychot::reseed(scenario, *seed);
  psychot::validate(scenario);

  const auto partial = out_path + ".partial";
  std::ofstream log(partial, std::ios::binary);
  if (!log) throw IoError("cannot open " + partial);
  psychot::RunOptions options;
  options.parallel = !serial;
  options.log = &log;
  psychot::RunResult result;
  try {
    result = psychot::run(scenario, options);
  } catch (const psychot::RunAborted& ex) {
    std::cerr << "run aborted: " << ex.what() << "; partial log left at " << partial << '\n';
    return kExitRuntime;
  }
  log.close();
  if (!log) throw IoError("cannot finish " + partial);
  std::filesystem::rename(partial, out_path);
  if (!report_path.empty()) write_json(psychot::to_json(result.report), report_path);
  std::cerr << "wrote " << result.events.size() << " events over " << scenario.run_ticks << " ticks to " << out_path
            << '\n';
  return 0;
}

int cmd_analyze(const std::string& log_path, const std::string& report_path) {
  std::ifstream in(log_path, std::ios::binary);
  if (!in) throw IoError("cannot open " + log_path);
  write_json(psychot::to_json(psychot::analyze(in)), report_path);
  return 0;
}

int cmd_orbits(const std::string& scenario_path, const std::string& processor, const std::string& agent_id,
               bool serial) {
  const auto scenario = psychot::load_scenario(read_file(scenario_path));
  const psychot::AgentConfig* agent = &scenario.agents.front();
  if (!agent_id.empty()) {
    agent = nullptr;
    for (const auto& a : scenario.agents)
      if (a.id == agent_id) agent = &a;
    if (!agent) throw psychot::ValidationError("--agent", "unknown agent '" + agent_id + "'");
  }
  const psychot::ProcessorSpec* proc = nullptr;
  for (const auto& p : agent->processors)
    if (p.id == processor) proc = &p;
  if (!proc) throw psychot::ValidationError("--processor", "agent '" + agent->id + "' has no processor '" + processor + "'");

  const auto& space = agent->metric;
  namespace k = psychot::kernels;
  const auto table = serial ? k::orbit_table_serial(space, *proc) : k::orbit_table_parallel(space, *proc);
  const auto interest = serial ? k::measure_table_serial(space, agent->interest_db)
                               : k::measure_table_parallel(space, agent->interest_db);
  const auto interdiction = serial ? k::measure_table_serial(space, agent->interdiction_db)
                                   : k::measure_table_parallel(space, agent->interdiction_db);

  ordered_json out;
  out["agent"] = agent->id;
  out["processor"] = proc->id;
  out["output"] = psychot::to_string(proc->output_target);
  ordered_json rows = ordered_json::array();
  for (const auto& row : table) {
    ordered_json r;
    r["start"] = space.decode(row.start).to_string();
    switch (row.kind) {
    case k::OrbitKind::Attractor:
      r["outcome"] = "attractor";
      r["point"] = space.decode(row.point).to_string();
      r["steps"] = row.length;
      r["interest"] = interest[row.point];
      r["interdiction"] = interdiction[row.point];
      break;
    case k::OrbitKind::Cycle:
      r["outcome"] = "cycle";
      r["point"] = space.decode(row.point).to_string();
      r["period"] = row.length;
      break;
    case k::OrbitKind::Exhausted:
      r["outcome"] = "exhausted";
      r["point"] = space.decode(row.point).to_string();
      break;
    }
    rows.push_back(std::move(r));
  }
  out["orbits"] = std::move(rows);
  ordered_json basin_list = ordered_json::array();
  for (const auto& [attractor, members] : k::basins(table)) {
    ordered_json b;
    b["attractor"] = space.decode(attractor).to_string();
    b["size"] = members.size();
    ordered_json pts = ordered_json::array();
    for (auto v : members) pts.push_back(space.decode(v).to_string());
    b["members"] = std::move(pts);
    basin_list.push_back(std::move(b));
  }
  out["basins"] = std::move(basin_list);
  std::cout << out.dump(2) << '\n';
  return 0;
}

psychot::HttpService* g_service = nullptr;

int cmd_serve(const std::string& host, int port, const std::string& log_dir) {
  std::optional<std::filesystem::path> dir;
  if (!log_dir.empty()) {
    dir = log_dir;
    std::filesystem::create_directories(*dir);
  }
  psychot::HttpService service(std::make_shared<psychot::SessionManager>(dir));
  g_service = &service;
  std::signal(SIGINT, [](int) {
    if (g_service) g_service->stop();
  });
  std::cerr << "serving sessions on http://" << host << ":" << port << '\n';
  if (!service.listen(host, port)) throw IoError("cannot listen on " + host + ":" + std::to_string(port));
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Psychot simulation engine"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, report_path, log_path, processor, agent_id, host = "127.0.0.1", log_dir;
  std::optional<std::uint64_t> ticks, seed;
  int port = 8080;
  bool serial = false;

  auto* run = app.add_subcommand("run", "Run a scenario and write its event log");
  run->add_option("--scenario", scenario_path, "Scenario file")->required();
  run->add_option("--ticks", ticks, "Override run_ticks");
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_path, "Event log output")->required();
  run->add_option("--report", report_path, "Also write the run report here");
  run->add_flag("--serial", serial, "Step agents with the serial reference loop");

  auto* analyze = app.add_subcommand("analyze", "Recompute the run report from an event log");
  analyze->add_option("--log", log_path, "Event log")->required();
  analyze->add_option("--report", report_path, "Report output (default stdout)");

  auto* orbits = app.add_subcommand("orbits", "Dump the orbit and basin table of a processor");
  orbits->add_option("--scenario", scenario_path, "Scenario file")->required();
  orbits->add_option("--processor", processor, "Processor id")->required();
  orbits->add_option("--agent", agent_id, "Agent id (default: first agent)");
  orbits->add_flag("--serial", serial, "Use the serial reference sweep");

  auto* serve = app.add_subcommand("serve", "Serve interactive sessions over HTTP");
  serve->add_option("--port", port, "TCP port")->required();
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--log-dir", log_dir, "Directory for logs of sessions ended with persist=true");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*run) return cmd_run(scenario_path, ticks, seed, out_path, report_path, serial);
    if (*analyze) return cmd_analyze(log_path, report_path);
    if (*orbits) return cmd_orbits(scenario_path, processor, agent_id, serial);
    if (*serve) return cmd_serve(host, port, log_dir);
  } catch (const psychot::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const psychot::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const psychot::InvalidPoint& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
