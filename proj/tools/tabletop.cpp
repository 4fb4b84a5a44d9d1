#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tabletop/engine.hpp"
#include "tabletop/harness.hpp"
#include "tabletop/metrics.hpp"
#include "tabletop/server.hpp"

using namespace tabletop;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_report(const FluencyReport& r) {
  std::printf("completed            %s\n", r.completed ? "yes" : "no");
  std::printf("completion time      %.2f s\n", r.completion_time_s);
  std::printf("user idle            %.1f %%\n", r.user_idle_pct);
  std::printf("robot idle           %.1f %%\n", r.robot_idle_pct);
  std::printf("concurrent activity  %.1f %%\n", r.concurrent_activity_pct);
  std::printf("user overhead        %.1f %%\n", r.user_overhead_pct);
  std::printf("robot errors         %d\n", r.robot_errors);
  std::printf("touches              allocation %d, manipulate %d, maneuver %d\n", r.touches.allocation,
              r.touches.manipulate, r.touches.maneuver);
}

int cmd_run(const std::string& plan_path, const std::string& out_dir, int workers, bool quiet) {
  ExperimentPlan plan = experiment_plan_from_json(nlohmann::json::parse(read_file(plan_path)));
  if (workers >= 0) plan.workers = static_cast<unsigned>(workers);
  ProgressFn progress;
  if (!quiet) {
    progress = [](std::size_t done, std::size_t total) {
      if (done == total || done % 50 == 0) std::fprintf(stderr, "\r%zu/%zu trials", done, total);
      if (done == total) std::fprintf(stderr, "\n");
    };
  }
  const BatchSummary s = run_batch(plan, out_dir, progress);
  std::printf("%zu trials: %zu run, %zu resumed from logs, %zu failed\n", s.rows.size(), s.ran, s.resumed, s.failed);
  for (const auto& name : plan.results) std::printf("wrote %s\n", (std::filesystem::path(out_dir) / name).c_str());
  return 0;
}

int cmd_trends(const std::string& results_path, bool as_json) {
  const auto rows = import_results(read_file(results_path), result_format_for(results_path));
  const TrendReport report = check_trends(rows);
  if (as_json) {
    std::cout << to_json(report).dump(2) << "\n";
  } else {
    std::cout << format_trend_report(report);
  }
  return report.all_pass() ? 0 : 1;
}

int cmd_serve(const ServerOptions& options) {
  SessionServer server(options);
  std::printf("serving %s on ws://%s:%u (tick %.1f Hz)\n", std::string(to_string(options.session.technique)).c_str(),
              options.address.c_str(), server.port(), options.tick_hz);
  std::fflush(stdout);
  server.run();
  return 0;
}

int cmd_replay(const std::string& log_path) {
  const EventLog log = parse_jsonl(read_file(log_path));
  const WorldState world = replay(log.header.scenario, log);
  std::printf("replayed %zu events: %d of %zu slots filled, %d robot errors\n", log.events.size(),
              world.filled_slots(), world.blocks.size(), world.robot.errors);
  if (!log.all<InputEvent>().empty()) {
    const EventLog again = resimulate_live(log);
    if (!(again.events == log.events)) {
      std::printf("live re-simulation DIVERGES from the recorded log\n");
      return 1;
    }
    std::printf("live re-simulation matches the recorded log\n");
  }
  print_report(fluency_report(log));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabletop human-robot task allocation simulator"};
  app.require_subcommand(1);

  std::string plan_path;
  std::string out_dir;
  int workers = -1;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run an experiment plan and write logs and results");
  run->add_option("--plan", plan_path, "Experiment plan (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--workers", workers, "Worker threads (default: plan value, 0 = all cores)");
  run->add_flag("--quiet", quiet, "No progress output");

  std::string results_path;
  bool as_json = false;
  auto* trends = app.add_subcommand("trends", "Check directional trends on a results table");
  trends->add_option("--results", results_path, "results.csv or results.json")->required()->check(CLI::ExistingFile);
  trends->add_flag("--json", as_json, "Print the report as JSON");

  ServerOptions options;
  std::string technique = "voice";
  std::string task = "coupled";
  std::string placement = "scattered";
  std::string log_dir;
  auto* serve = app.add_subcommand("serve", "Serve live sessions over WebSocket");
  serve->add_option("--port", options.port, "TCP port")->required();
  serve->add_option("--technique", technique, "Allocation technique")->required();
  serve->add_option("--task", task, "coupled or decoupled")->required();
  serve->add_option("--placement", placement, "scattered or sorted")->required();
  serve->add_option("--seed", options.session.seed, "Scenario seed")->required();
  serve->add_option("--address", options.address, "Bind address");
  serve->add_option("--tick-hz", options.tick_hz, "Simulated ticks per wall-clock second");
  serve->add_option("--diff-every", options.session.ticks_per_diff, "Ticks per state_diff");
  serve->add_option("--tick-limit", options.session.tick_limit, "Tick limit per trial");
  serve->add_option("--log-dir", log_dir, "Directory for session logs");

  std::string log_path;
  auto* rep = app.add_subcommand("replay", "Replay a JSON-lines event log and report its metrics");
  rep->add_option("--log", log_path, "Event log")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(plan_path, out_dir, workers, quiet);
    if (*trends) return cmd_trends(results_path, as_json);
    if (*serve) {
      options.session.technique = parse_policy_kind(technique);
      options.session.task_type = parse_task_type(task);
      options.session.placement = parse_placement(placement);
      if (!log_dir.empty()) options.session.log_dir = log_dir;
      return cmd_serve(options);
    }
    if (*rep) return cmd_replay(log_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
