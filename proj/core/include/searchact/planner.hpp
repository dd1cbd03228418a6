#pragma once

#include <array>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "searchact/arena_grid.hpp"
#include "searchact/belief.hpp"
#include "searchact/reward_dp.hpp"
#include "searchact/tasks.hpp"

namespace searchact {

struct PlannerParams {
  GridSpec grid;
  CostParams cost;
  BudgetQuantizer quantizer;
  double calc_time = 10.0;         // dead time charged before each chosen action
  double tracking_timeout = 4.0;
  int horizon = 3;                 // path length in cell moves
};

/// Fly to the first path cell (if not already there), then through the rest.
struct ExploreAction {
  std::vector<CellIndex> path;
  double cost = 0.0;  // seconds, including the leg to the path start
  std::vector<CellIndex> cells_observed;
  bool from_best_cell = false;
};

struct ExecuteTask {
  int task_id = -1;
};

/// Nothing worth doing now; the agent waits and replans.
struct IdleAction {};

using PlanAction = std::variant<ExploreAction, ExecuteTask, IdleAction>;

/// An undiscovered (or lost) object the planner may still find.
struct TrackedObject {
  ObjectClass cls;
  BeliefGrid belief;
};

struct PeerState {
  int agent_id = 0;
  Position position;   // where the peer will be when its current action ends
  double budget = 0.0; // time it will have left then
  double ready_at = 0.0;
};

/// Snapshot of everything one agent's planner sees at a decision point.
struct PlanContext {
  int my_id = 0;
  double now = 0.0;
  Position my_position;
  double my_budget = 0.0;  // seconds left after this replan's calculation time
  std::vector<FoundTask> found_tasks;
  std::vector<TrackedObject> beliefs;
  std::set<int> claimed_tasks;
  std::set<CellIndex> claimed_cells;
  std::vector<PeerState> peers;
};

inline constexpr double kInfeasibleAction = -std::numeric_limits<double>::infinity();

/// Self-avoiding 4-connected walks of `moves` steps from `start`, cut short
/// where the boundary leaves no way on. Not deduplicated.
std::vector<std::vector<CellIndex>> self_avoiding_walks(CellIndex start, const GridSpec& grid,
                                                        int moves);

// Every self-avoiding 4-connected walk of `horizon` moves from the agent's cell
// (shorter when the boundary cuts it off), plus the four straight walks from
// the cell with the highest predicted score (nearest to the agent among equal
// scores). Walks covering the same cell set
// are merged, keeping the cheapest.
std::vector<ExploreAction> enumerate_actions(const PlanContext& ctx, const PlannerParams& params,
                                             int horizon);

/// Memo for J evaluations that repeat across candidate actions of one replan.
/// Only valid for a single context.
struct RewardCache {
  std::map<std::array<long long, 6>, int> values;
};

// Expected change in predicted deliverable reward from flying `a`:
//
//   sum_i p_i [J(T + i, t') - J(T, t)] + max(0, 1 - sum_i p_i) [J(T', t') - J(T, t)]
//
// with t' = t - c_a - calc_time, the budget left at the next decision. Inside
// J every pickup after the first also pays calc_time.
//
// p_i is object i's belief mass on the unclaimed cells of the path, the
// hypothetical task i sits at its highest-mass path cell, and T' drops moving
// tasks that will have expired by the next decision. J is the sequential
// multi-agent prediction over this agent and its peers. Returns
// kInfeasibleAction when a.cost >= ctx.my_budget.
double evaluate_action(const ExploreAction& a, const PlanContext& ctx,
                       const PlannerParams& params);
double evaluate_action(const ExploreAction& a, const PlanContext& ctx,
                       const PlannerParams& params, RewardCache& cache);

struct ScoredAction {
  ExploreAction action;
  double value = kInfeasibleAction;
};

struct Decision {
  PlanAction action;
  std::vector<ScoredAction> top;  // best candidates first, at most five
  std::vector<int> released;      // claims dropped because their holder crashed
};

/// J(T, t) for the context as-is: this agent from its position plus the peers.
int predicted_reward(const PlanContext& ctx, const PlannerParams& params);

Decision select_action(const PlanContext& ctx, const PlannerParams& params, int horizon);

/// Who is committed to what.
class ClaimBoard {
 public:
  explicit ClaimBoard(int agents);

  /// Replaces the agent's claim. Throws std::logic_error if another agent
  /// already holds the task.
  void post(int agent, const PlanAction& action);
  void release(int agent);
  void mark_crashed(int agent);

  /// Drops claims still held by crashed agents and returns their task ids.
  std::vector<int> acknowledge_crashes();

  bool alive(int agent) const { return !crashed_.at(agent); }
  std::optional<int> task_of(int agent) const { return task_.at(agent); }
  // Claims of every agent other than `except`, including crashed agents whose
  // claims nobody has acknowledged yet.
  std::set<int> claimed_tasks(int except) const;
  std::set<CellIndex> claimed_cells(int except) const;
  /// True if two agents hold the same task; never expected to happen.
  bool has_duplicate_task_claims() const;

 private:
  std::vector<std::optional<int>> task_;
  std::vector<std::vector<CellIndex>> cells_;
  std::vector<bool> crashed_;
};

// Fills the context's claims from the board, forgets crashed peers, selects an
// action and posts it as this agent's claim.
Decision replan(PlanContext ctx, ClaimBoard& board, const PlannerParams& params, int horizon);

}  // namespace searchact
