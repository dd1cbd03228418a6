#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "searchact/arena_grid.hpp"
#include "searchact/belief.hpp"
#include "searchact/event_log.hpp"
#include "searchact/planner.hpp"
#include "searchact/tasks.hpp"

namespace searchact {

/// Raised for scenario settings that cannot be simulated.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Strategy { Proposed, Random, CoverFieldFirst, CoverAndPickup };

std::string_view to_string(Strategy s);
/// Accepts proposed, random, cover_first, cover_pickup. Throws ConfigError.
Strategy strategy_from_string(std::string_view s);

struct ObjectInventory {
  int static_1pt = 4;
  int static_2pt = 3;
  int static_3pt = 3;
  int moving_3pt = 10;

  int total() const { return static_1pt + static_2pt + static_3pt + moving_3pt; }
};

/// An object at a fixed starting position, replacing the random inventory.
struct Placement {
  ObjectClass cls;
  Position pos;
};

struct ScenarioConfig {
  GridSpec grid;
  ObjectInventory objects;
  std::vector<Placement> placements;  // when nonempty, used instead of `objects`
  double object_speed = 1.0;
  int uav_count = 3;
  CostParams cost;
  double t0 = 1200.0;
  double tracking_timeout = 4.0;
  double calc_time = 10.0;
  double p_out = 0.1;
  int horizon = 3;
  double idle_wait = 5.0;
  double heading_period = 5.0;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::Proposed;
  std::optional<int> crash_agent;
  double crash_time = 0.0;

  /// Throws ConfigError.
  void validate() const;
  PlannerParams planner_params() const;
};

/// mt19937_64 with portable conversions (the std distributions are not).
class Rng {
 public:
  Rng() = default;
  Rng(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t next() { return engine_(); }
  double uniform();                    // [0, 1)
  double uniform(double lo, double hi);
  std::size_t index(std::size_t n);    // [0, n)

 private:
  std::mt19937_64 engine_;
};

enum class ObjectStatus { InField, BeingCarried, Delivered, Lost };

struct SimObject {
  int object_id = 0;
  ObjectClass cls;
  Position true_pos;
  ObjectStatus status = ObjectStatus::InField;
  bool pinned = false;  // held in place while an agent is picking it
  double heading = 0.0;
  double next_turn = 0.0;
  Rng rng;
};

enum class Phase { Deciding, Exploring, Approaching, Picking, Transferring, Dropping, Crashed, Idle };

std::string_view to_string(Phase p);

struct AgentState {
  int agent_id = 0;
  Position pos;
  Phase phase = Phase::Idle;
  std::optional<int> carried;
  std::optional<int> target;  // object being approached or picked
  double busy_since = 0.0;
  double budget_used = 0.0;   // seconds spent in completed actions

  // Current straight-line leg; pos is interpolated along it.
  Position leg_from;
  Position leg_to;
  double leg_start = 0.0;
  double leg_end = 0.0;
  std::vector<Position> waypoints;  // remaining, front first
  std::uint64_t generation = 0;     // bumps on every interruption

  // What peers assume about this agent when planning.
  Position free_pos;
  double free_at = 0.0;
};

/// Everything the agents know, shared through broadcast.
struct Knowledge {
  std::vector<BeliefGrid> beliefs;   // by object id
  std::map<int, FoundTask> found;    // located, uncarried objects
  std::vector<bool> ever_detected;   // by object id
};

struct ScorePoint {
  double time = 0.0;
  int score = 0;
};

struct MissionState {
  ScenarioConfig cfg;
  double clock = 0.0;
  std::vector<AgentState> agents;
  std::vector<SimObject> objects;
  Knowledge knowledge;
  ClaimBoard claims{0};
  int score = 0;
  std::vector<ScorePoint> trace;
  EventLog log;
};

struct MissionReport {
  Strategy strategy = Strategy::Proposed;
  std::uint64_t seed = 0;
  double t0 = 0.0;
  int final_score = 0;
  std::vector<ScorePoint> trace;
  int delivered = 0;
  int lost = 0;
  int decisions = 0;
  EventLog log;

  /// Score held at time t.
  int score_at(double t) const;
};

/// Objects placed (seeded by cfg.seed only), agents at the drop box, uniform
/// beliefs, CONFIG and OBJECT lines logged. Throws ConfigError.
MissionState make_initial_state(const ScenarioConfig& cfg);

/// Advances every free moving object by dt along its heading, reflecting at
/// the walls. Headings are resampled every cfg.heading_period seconds.
void step_moving_objects(MissionState& state, double dt);

/// Looks at the cell under `agent`: updates beliefs and found tasks and
/// returns what was seen. Newly found objects are logged.
Observation sense(MissionState& state, int agent);

/// Crashes the agent now: a carried object is lost and the agent stops.
/// Peers notice at their next decision. Throws std::domain_error for an
/// unknown agent.
void inject_crash(MissionState& state, int agent);

class Simulator {
 public:
  explicit Simulator(const ScenarioConfig& cfg);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Schedules a crash. Throws std::domain_error for an unknown agent.
  void inject_crash(int agent, double time);
  MissionReport run();
  const MissionState& state() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

MissionReport run_mission(const ScenarioConfig& cfg);
MissionReport run_strategy_random(ScenarioConfig cfg);
MissionReport run_strategy_cover_first(ScenarioConfig cfg);
MissionReport run_strategy_cover_pickup(ScenarioConfig cfg);

}  // namespace searchact
