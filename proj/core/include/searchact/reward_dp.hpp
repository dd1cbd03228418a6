#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "searchact/arena_grid.hpp"
#include "searchact/tasks.hpp"

namespace searchact {

/// What the reward DP decided for one task.
enum class DecisionLabel {
  Skip,       // not picked up
  PickFirst,  // picked up first, starting from the agent's current position
  PickLater,  // picked up after a delivery, starting from the drop box
};

std::string_view to_string(DecisionLabel label);

/// One candidate task for a single agent's budgeted selection.
struct DpItem {
  int task_id = -1;
  double cost_from_drop = 0.0;   // c_k, seconds
  double cost_from_agent = 0.0;  // c*_k, seconds
  int reward = 0;
};

struct DpInstance {
  std::vector<DpItem> items;
  double budget = 0.0;  // seconds

  /// Throws std::invalid_argument for nonpositive costs, negative rewards or budget.
  void validate() const;
};

/// Maps seconds onto integer DP budget units. Costs round up, budgets round
/// down, so the DP never promises reward the continuous problem cannot deliver.
struct BudgetQuantizer {
  double step = 1.0;

  int cost_units(double seconds) const;
  int budget_units(double seconds) const;
};

/// Sentinel for B* entries with no selection that has exactly one first pickup.
inline constexpr int kInfeasible = std::numeric_limits<int>::min() / 4;

/// The two budget-indexed value tables and the decision labels read back from them.
///
/// `from_drop` holds B(k, tau): best reward from items 1..k when every pickup
/// starts at the drop box. `from_agent` holds B*(k, tau): best reward from
/// items 1..k when exactly one of them is picked first from the agent's
/// position. B*(0, tau) is infeasible, since a nonempty selection always needs
/// a first pickup. Both are (items + 1) x (budget_steps + 1), row-major in k.
struct DpTables {
  int items = 0;
  int budget_steps = 0;
  std::vector<int> from_drop;
  std::vector<int> from_agent;
  std::vector<DecisionLabel> labels;

  int B(int k, int tau) const { return from_drop[index(k, tau)]; }
  int raw_B_star(int k, int tau) const { return from_agent[index(k, tau)]; }
  /// B* with infeasible entries reported as 0 (take nothing).
  int B_star(int k, int tau) const;
  int value() const { return B_star(items, budget_steps); }

 private:
  std::size_t index(int k, int tau) const {
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(budget_steps + 1) +
           static_cast<std::size_t>(tau);
  }
};

DpTables solve_tables(const DpInstance& inst, const BudgetQuantizer& q = {});

struct DpSolution {
  int value = 0;
  std::vector<DecisionLabel> labels;  // parallel to inst.items
};

/// Budgeted task selection for one agent with first-pickup special casing.
///
/// Tie-breaks: Skip wins a tie against taking a task, PickLater wins a tie
/// against PickFirst. At most one task is labeled PickFirst.
DpSolution predict_reward_single(const DpInstance& inst, const BudgetQuantizer& q = {});

/// Same value as predict_reward_single(inst, q).value without materializing tables.
int predict_reward_value(const DpInstance& inst, const BudgetQuantizer& q = {});

/// Plain-text dump of both tables for debugging.
std::string dump(const DpTables& tables);

// ---------------------------------------------------------------------------
// Multiple agents

struct MultiItem {
  int task_id = -1;
  double cost_from_drop = 0.0;
  std::vector<double> cost_from_agent;  // one entry per agent
  int reward = 0;
};

/// Agents are listed in allocation order (ascending agent id).
struct MultiInstance {
  std::vector<MultiItem> items;
  std::vector<double> budgets;

  void validate() const;
  DpInstance for_agent(std::size_t agent, std::span<const std::size_t> item_indices) const;
};

struct Allocation {
  int value = 0;
  std::vector<int> agent_of;             // per item, -1 when unassigned
  std::vector<DecisionLabel> labels;     // per item, relative to its agent
  std::vector<int> agent_value;          // per agent
};

/// Sequential allocation: each agent, in order, solves its single-agent DP over
/// the tasks the previous agents left, and its selection is removed.
Allocation allocate_sequential(const MultiInstance& inst, const BudgetQuantizer& q = {});

/// Value of allocate_sequential, with shortcuts for agents that can take everything.
int predict_reward_multi(const MultiInstance& inst, const BudgetQuantizer& q = {});

struct AgentSlot {
  int agent_id = 0;
  Position position;
  double budget = 0.0;
};

/// Builds the multi-agent instance from found tasks: c_k from the drop box,
/// c*_k from each agent's position. Agents are sorted by id. Negative budgets
/// are clamped to zero.
MultiInstance make_multi_instance(std::span<const AgentSlot> agents,
                                  std::span<const FoundTask> tasks, const CostParams& params,
                                  const GridSpec& grid);

int predict_reward_multi(std::span<const AgentSlot> agents, std::span<const FoundTask> tasks,
                         const CostParams& params, const GridSpec& grid,
                         const BudgetQuantizer& q = {});

}  // namespace searchact
