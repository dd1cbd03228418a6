#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "searchact/event_log.hpp"
#include "searchact/sim.hpp"

namespace searchact {

// --- configuration ----------------------------------------------------------

/// Reads a flat JSON object. Every ScenarioConfig field has a key; missing keys
/// keep their defaults. Unknown keys, wrong types and invalid values throw
/// ConfigError.
ScenarioConfig config_from_json(std::string_view text, ScenarioConfig base = {});
ScenarioConfig load_config(const std::filesystem::path& path, ScenarioConfig base = {});
std::string config_to_json(const ScenarioConfig& cfg);

/// Lists the keys config_from_json accepts.
std::vector<std::string> config_keys();

// --- sweeps -----------------------------------------------------------------

struct SweepSpec {
  std::vector<double> t0_values{100, 200, 300, 400, 500, 600, 700, 800, 900};
  int trials_per_t0 = 5;
  std::vector<Strategy> strategies{Strategy::Proposed, Strategy::Random,
                                   Strategy::CoverFieldFirst, Strategy::CoverAndPickup};
  std::uint64_t base_seed = 0;

  void validate() const;  // throws ConfigError
};

struct SweepOptions {
  int jobs = 1;
  bool timing = false;     // record wall-clock runtime; otherwise runtime_ms is 0
  bool keep_logs = false;
};

struct SweepRow {
  Strategy strategy = Strategy::Proposed;
  double t0 = 0.0;
  std::uint64_t seed = 0;
  int score = 0;
  double runtime_ms = 0.0;
  std::string log;  // event log text, when kept
};

struct SweepGroup {
  Strategy strategy = Strategy::Proposed;
  double t0 = 0.0;
  int trials = 0;
  double mean = 0.0;
  int min = 0;
  int max = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;      // sorted by (strategy, t0, seed)
  std::vector<SweepGroup> groups;  // same order, one per (strategy, t0)
};

/// Strategies sort in enum order (proposed, random, cover_first, cover_pickup).
SweepResult run_sweep(const SweepSpec& spec, const ScenarioConfig& base,
                      const SweepOptions& options = {});

std::vector<SweepGroup> aggregate(const std::vector<SweepRow>& rows);

class HarnessIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string rows_csv(const SweepResult& result);
std::string groups_csv(const SweepResult& result);

/// `foo.csv` -> `foo_aggregates.csv`.
std::filesystem::path aggregates_path(const std::filesystem::path& csv_path);

/// Writes rows to `path` and groups to aggregates_path(path). Throws
/// HarnessIoError naming the path.
void emit_csv(const SweepResult& result, const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, std::string_view text);

// --- replay -----------------------------------------------------------------

class ReplayViolation : public std::runtime_error {
 public:
  ReplayViolation(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

/// Rebuilds the report from a log and checks it: score derivation and
/// monotonicity, no deliveries after t0, object conservation, no task claimed
/// by two agents at once, detection before pickup, no activity from crashed
/// agents, END matching the derived score. Throws LogParseError for malformed
/// or truncated logs and ReplayViolation for broken invariants.
MissionReport replay(const std::vector<LogEvent>& events);
MissionReport replay(std::istream& in);
MissionReport replay_file(const std::filesystem::path& path);

std::string report_to_json(const MissionReport& report);

}  // namespace searchact
