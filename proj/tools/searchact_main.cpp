// searchact: run, sweep and replay search-and-pickup missions.
//
//   searchact run --seed 3 --strategy proposed --t0 600 --log m.log
//   searchact sweep --trials 20 --jobs 4 --out scores.csv
//   searchact replay m.log
//
// Exit codes: 0 ok, 1 invariant violation, 2 bad configuration or input.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "searchact/harness.hpp"

namespace sa = searchact;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kBadInput = 2;

struct RunArgs {
  std::string config;
  std::uint64_t seed = 0;
  std::string strategy;
  double t0 = 0.0;
  std::optional<int> uav_count;
  std::optional<int> crash_agent;
  std::optional<double> crash_time;
  std::string log;
  std::string report;
};

struct SweepArgs {
  std::string config;
  std::vector<double> t0_values;
  std::optional<int> trials;
  std::vector<std::string> strategies;
  std::uint64_t base_seed = 0;
  int jobs = 1;
  bool timing = false;
  std::string out = "scores.csv";
  std::string logs;
};

struct ReplayArgs {
  std::string log;
  std::string report;
};

sa::ScenarioConfig base_config(const std::string& path) {
  return path.empty() ? sa::ScenarioConfig{} : sa::load_config(path);
}

void print_report(const sa::MissionReport& r) {
  std::printf("strategy=%s seed=%llu t0=%g score=%d delivered=%d lost=%d decisions=%d\n",
              std::string(sa::to_string(r.strategy)).c_str(),
              static_cast<unsigned long long>(r.seed), r.t0, r.final_score, r.delivered, r.lost,
              r.decisions);
}

int cmd_run(const RunArgs& a) {
  sa::ScenarioConfig cfg = base_config(a.config);
  cfg.seed = a.seed;
  cfg.strategy = sa::strategy_from_string(a.strategy);
  cfg.t0 = a.t0;
  if (a.uav_count) cfg.uav_count = *a.uav_count;
  if (a.crash_agent) cfg.crash_agent = *a.crash_agent;
  if (a.crash_time) cfg.crash_time = *a.crash_time;
  cfg.validate();

  const sa::MissionReport r = sa::run_mission(cfg);
  if (!a.log.empty()) sa::write_text(a.log, r.log.text());
  if (!a.report.empty()) sa::write_text(a.report, sa::report_to_json(r));
  print_report(r);
  return kOk;
}

int cmd_sweep(const SweepArgs& a) {
  const sa::ScenarioConfig base = base_config(a.config);
  sa::SweepSpec spec;
  if (!a.t0_values.empty()) spec.t0_values = a.t0_values;
  if (a.trials) spec.trials_per_t0 = *a.trials;
  if (!a.strategies.empty()) {
    spec.strategies.clear();
    for (const std::string& s : a.strategies) spec.strategies.push_back(sa::strategy_from_string(s));
  }
  spec.base_seed = a.base_seed;

  sa::SweepOptions opt;
  opt.jobs = a.jobs;
  opt.timing = a.timing;
  opt.keep_logs = !a.logs.empty();
  const sa::SweepResult result = sa::run_sweep(spec, base, opt);

  if (!a.logs.empty()) {
    std::error_code ec;
    fs::create_directories(a.logs, ec);
    if (ec) throw sa::HarnessIoError("cannot create " + a.logs + ": " + ec.message());
    for (const sa::SweepRow& row : result.rows) {
      char name[128];
      std::snprintf(name, sizeof name, "%s_t%g_s%llu.log",
                    std::string(sa::to_string(row.strategy)).c_str(), row.t0,
                    static_cast<unsigned long long>(row.seed));
      sa::write_text(fs::path(a.logs) / name, row.log);
    }
  }
  sa::emit_csv(result, a.out);

  for (const sa::SweepGroup& g : result.groups) {
    std::printf("%-13s t0=%-5g mean=%7.3f min=%3d max=%3d (n=%d)\n",
                std::string(sa::to_string(g.strategy)).c_str(), g.t0, g.mean, g.min, g.max,
                g.trials);
  }
  std::printf("wrote %s and %s\n", a.out.c_str(), sa::aggregates_path(a.out).string().c_str());
  return kOk;
}

int cmd_replay(const ReplayArgs& a) {
  const sa::MissionReport r = sa::replay_file(a.log);
  if (!a.report.empty()) sa::write_text(a.report, sa::report_to_json(r));
  print_report(r);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-UAV search and pickup missions"};
  app.require_subcommand(1);

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a single mission");
  run_cmd->add_option("--config", run.config, "JSON scenario file")->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", run.seed, "Scenario seed")->required();
  run_cmd->add_option("--strategy", run.strategy,
                      "proposed, random, cover_first or cover_pickup")->required();
  run_cmd->add_option("--t0", run.t0, "Time limit, seconds")->required();
  run_cmd->add_option("--uav-count", run.uav_count, "Number of agents");
  run_cmd->add_option("--crash-agent", run.crash_agent, "Agent to crash");
  run_cmd->add_option("--crash-time", run.crash_time, "Crash time, seconds");
  run_cmd->add_option("--log", run.log, "Write the event log here");
  run_cmd->add_option("--report", run.report, "Write a JSON report here");

  SweepArgs sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run missions over time limits and seeds");
  sweep_cmd->add_option("--config", sweep.config, "JSON scenario file")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--t0", sweep.t0_values, "Time limits (default 100..900 step 100)");
  sweep_cmd->add_option("--trials", sweep.trials, "Seeds per time limit (default 5)");
  sweep_cmd->add_option("--strategies", sweep.strategies, "Strategies (default all four)");
  sweep_cmd->add_option("--base-seed", sweep.base_seed, "First seed");
  sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--timing", sweep.timing, "Record wall-clock runtime_ms (not reproducible)");
  sweep_cmd->add_option("--out", sweep.out, "Score CSV path");
  sweep_cmd->add_option("--logs", sweep.logs, "Directory for per-mission event logs");

  ReplayArgs rep;
  CLI::App* replay_cmd = app.add_subcommand("replay", "Check a mission log and rebuild its report");
  replay_cmd->add_option("log", rep.log, "Event log")->required();
  replay_cmd->add_option("--report", rep.report, "Write a JSON report here");

  CLI::App* config_cmd = app.add_subcommand("config", "Print the default scenario as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*sweep_cmd) return cmd_sweep(sweep);
    if (*replay_cmd) return cmd_replay(rep);
    if (*config_cmd) {
      std::fputs(sa::config_to_json(sa::ScenarioConfig{}).c_str(), stdout);
      return kOk;
    }
  } catch (const sa::ReplayViolation& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return kViolation;
  } catch (const sa::LogParseError& e) {
    std::fprintf(stderr, "malformed log: %s\n", e.what());
    return kBadInput;
  } catch (const sa::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kBadInput;
  } catch (const sa::HarnessIoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadInput;
  }
  return kOk;
}
