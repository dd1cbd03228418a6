#include "searchact/reward_dp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace searchact {
namespace {

// Absorbs floating noise such as 45.000000000000007 s before rounding.
constexpr double kQuantEps = 1e-9;

struct UnitItem {
  int c = 0;       // from drop box
  int c_star = 0;  // from agent
  int r = 0;
};

std::vector<UnitItem> to_units(const DpInstance& inst, const BudgetQuantizer& q) {
  std::vector<UnitItem> out;
  out.reserve(inst.items.size());
  for (const DpItem& it : inst.items) {
    out.push_back({q.cost_units(it.cost_from_drop), q.cost_units(it.cost_from_agent), it.reward});
  }
  return out;
}

// Value of the all-items selection when it fits, -1 otherwise.
int all_fit_value(std::span<const UnitItem> items, int budget) {
  if (items.empty()) return 0;
  long long total = 0;
  long long best_delta = std::numeric_limits<long long>::max();
  int reward = 0;
  for (const UnitItem& it : items) {
    total += it.c;
    best_delta = std::min<long long>(best_delta, static_cast<long long>(it.c_star) - it.c);
    reward += it.r;
  }
  return total + best_delta <= budget ? reward : -1;
}

int max_with(int current, int candidate) { return candidate > current ? candidate : current; }

}  // namespace

std::string_view to_string(DecisionLabel label) {
  switch (label) {
    case DecisionLabel::Skip: return "skip";
    case DecisionLabel::PickFirst: return "pick_first";
    case DecisionLabel::PickLater: return "pick_later";
  }
  return "?";
}

void DpInstance::validate() const {
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw std::invalid_argument("dp instance: budget must be nonnegative");
  }
  for (const DpItem& it : items) {
    if (!(it.cost_from_drop > 0.0) || !(it.cost_from_agent > 0.0)) {
      throw std::invalid_argument("dp instance: task costs must be positive");
    }
    if (it.reward < 0) throw std::invalid_argument("dp instance: rewards must be nonnegative");
  }
}

int BudgetQuantizer::cost_units(double seconds) const {
  if (!(step > 0.0)) throw std::invalid_argument("budget quantizer: step must be positive");
  return std::max(1, static_cast<int>(std::ceil(seconds / step - kQuantEps)));
}

int BudgetQuantizer::budget_units(double seconds) const {
  if (!(step > 0.0)) throw std::invalid_argument("budget quantizer: step must be positive");
  if (seconds <= 0.0) return 0;
  return static_cast<int>(std::floor(seconds / step + kQuantEps));
}

int DpTables::B_star(int k, int tau) const { return std::max(0, raw_B_star(k, tau)); }

DpTables solve_tables(const DpInstance& inst, const BudgetQuantizer& q) {
  inst.validate();
  const std::vector<UnitItem> items = to_units(inst, q);
  const int n = static_cast<int>(items.size());
  const int T = q.budget_units(inst.budget);

  DpTables t;
  t.items = n;
  t.budget_steps = T;
  const auto width = static_cast<std::size_t>(T + 1);
  t.from_drop.assign(static_cast<std::size_t>(n + 1) * width, 0);
  t.from_agent.assign(static_cast<std::size_t>(n + 1) * width, kInfeasible);

  auto B = [&](int k, int tau) -> int& { return t.from_drop[k * width + tau]; };
  auto S = [&](int k, int tau) -> int& { return t.from_agent[k * width + tau]; };

  for (int k = 1; k <= n; ++k) {
    const UnitItem& it = items[k - 1];
    for (int tau = 0; tau <= T; ++tau) {
      int b = B(k - 1, tau);
      if (it.c <= tau) b = max_with(b, B(k - 1, tau - it.c) + it.r);
      B(k, tau) = b;

      int s = S(k - 1, tau);
      if (it.c_star <= tau) s = max_with(s, B(k - 1, tau - it.c_star) + it.r);
      if (it.c <= tau && S(k - 1, tau - it.c) != kInfeasible) {
        s = max_with(s, S(k - 1, tau - it.c) + it.r);
      }
      S(k, tau) = s;
    }
  }

  // Read the labels back from B*(n, T).
  t.labels.assign(static_cast<std::size_t>(n), DecisionLabel::Skip);
  if (n > 0 && S(n, T) > 0) {
    bool in_star = true;
    int tau = T;
    for (int k = n; k >= 1; --k) {
      const UnitItem& it = items[k - 1];
      if (in_star) {
        const int cur = S(k, tau);
        if (S(k - 1, tau) == cur) continue;
        if (it.c <= tau && S(k - 1, tau - it.c) != kInfeasible &&
            S(k - 1, tau - it.c) + it.r == cur) {
          t.labels[k - 1] = DecisionLabel::PickLater;
          tau -= it.c;
        } else {
          t.labels[k - 1] = DecisionLabel::PickFirst;
          tau -= it.c_star;
          in_star = false;
        }
      } else {
        const int cur = B(k, tau);
        if (B(k - 1, tau) == cur) continue;
        t.labels[k - 1] = DecisionLabel::PickLater;
        tau -= it.c;
      }
    }
  }
  return t;
}

DpSolution predict_reward_single(const DpInstance& inst, const BudgetQuantizer& q) {
  DpTables t = solve_tables(inst, q);
  return DpSolution{t.value(), std::move(t.labels)};
}

int predict_reward_value(const DpInstance& inst, const BudgetQuantizer& q) {
  inst.validate();
  const std::vector<UnitItem> items = to_units(inst, q);
  const int budget = q.budget_units(inst.budget);
  if (items.empty() || budget == 0) return 0;
  if (const int all = all_fit_value(items, budget); all >= 0) return all;

  // Entries beyond the cost of every item at its dearest are saturated.
  long long saturate = 0;
  for (const UnitItem& it : items) saturate += std::max(it.c, it.c_star);
  const int T = static_cast<int>(std::min<long long>(budget, saturate));

  std::vector<int> B(static_cast<std::size_t>(T + 1), 0);
  std::vector<int> S(static_cast<std::size_t>(T + 1), kInfeasible);
  for (const UnitItem& it : items) {
    for (int tau = T; tau >= 0; --tau) {
      int s = S[tau];
      if (it.c_star <= tau) s = max_with(s, B[tau - it.c_star] + it.r);
      if (it.c <= tau && S[tau - it.c] != kInfeasible) s = max_with(s, S[tau - it.c] + it.r);
      S[tau] = s;
    }
    for (int tau = T; tau >= it.c; --tau) B[tau] = max_with(B[tau], B[tau - it.c] + it.r);
  }
  return std::max(0, S[T]);
}

std::string dump(const DpTables& t) {
  std::string out;
  char buf[32];
  auto emit = [&](const char* name, auto get) {
    out += name;
    out += "\n";
    for (int k = 0; k <= t.items; ++k) {
      for (int tau = 0; tau <= t.budget_steps; ++tau) {
        const int v = get(k, tau);
        if (v == kInfeasible) {
          out += tau ? " -" : "-";
        } else {
          std::snprintf(buf, sizeof buf, tau ? " %d" : "%d", v);
          out += buf;
        }
      }
      out += "\n";
    }
  };
  emit("B", [&](int k, int tau) { return t.B(k, tau); });
  emit("B*", [&](int k, int tau) { return t.raw_B_star(k, tau); });
  out += "labels";
  for (const DecisionLabel l : t.labels) {
    out += " ";
    out += to_string(l);
  }
  out += "\n";
  return out;
}

// ---------------------------------------------------------------------------

void MultiInstance::validate() const {
  for (const double b : budgets) {
    if (!(b >= 0.0)) throw std::invalid_argument("multi instance: budgets must be nonnegative");
  }
  for (const MultiItem& it : items) {
    if (it.cost_from_agent.size() != budgets.size()) {
      throw std::invalid_argument("multi instance: one agent cost per agent required");
    }
    if (!(it.cost_from_drop > 0.0) || it.reward < 0) {
      throw std::invalid_argument("multi instance: costs must be positive, rewards nonnegative");
    }
    for (const double c : it.cost_from_agent) {
      if (!(c > 0.0)) throw std::invalid_argument("multi instance: costs must be positive");
    }
  }
}

DpInstance MultiInstance::for_agent(std::size_t agent,
                                    std::span<const std::size_t> item_indices) const {
  DpInstance d;
  d.budget = budgets.at(agent);
  d.items.reserve(item_indices.size());
  for (const std::size_t i : item_indices) {
    const MultiItem& it = items[i];
    d.items.push_back({it.task_id, it.cost_from_drop, it.cost_from_agent[agent], it.reward});
  }
  return d;
}

Allocation allocate_sequential(const MultiInstance& inst, const BudgetQuantizer& q) {
  inst.validate();
  Allocation a;
  a.agent_of.assign(inst.items.size(), -1);
  a.labels.assign(inst.items.size(), DecisionLabel::Skip);
  a.agent_value.assign(inst.budgets.size(), 0);

  std::vector<std::size_t> remaining(inst.items.size());
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});
  for (std::size_t j = 0; j < inst.budgets.size() && !remaining.empty(); ++j) {
    const DpSolution sol = predict_reward_single(inst.for_agent(j, remaining), q);
    a.agent_value[j] = sol.value;
    a.value += sol.value;
    std::vector<std::size_t> left;
    for (std::size_t p = 0; p < remaining.size(); ++p) {
      if (sol.labels[p] == DecisionLabel::Skip) {
        left.push_back(remaining[p]);
      } else {
        a.agent_of[remaining[p]] = static_cast<int>(j);
        a.labels[remaining[p]] = sol.labels[p];
      }
    }
    remaining = std::move(left);
  }
  return a;
}

int predict_reward_multi(const MultiInstance& inst, const BudgetQuantizer& q) {
  inst.validate();
  std::vector<std::size_t> remaining(inst.items.size());
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});
  int total = 0;
  const std::size_t m = inst.budgets.size();
  for (std::size_t j = 0; j < m && !remaining.empty(); ++j) {
    const DpInstance d = inst.for_agent(j, remaining);
    if (j + 1 == m) {
      total += predict_reward_value(d, q);
      break;
    }
    const std::vector<UnitItem> units = to_units(d, q);
    if (const int all = all_fit_value(units, q.budget_units(d.budget)); all >= 0) {
      total += all;
      break;
    }
    const DpSolution sol = predict_reward_single(d, q);
    total += sol.value;
    std::vector<std::size_t> left;
    for (std::size_t p = 0; p < remaining.size(); ++p) {
      if (sol.labels[p] == DecisionLabel::Skip) left.push_back(remaining[p]);
    }
    remaining = std::move(left);
  }
  return total;
}

MultiInstance make_multi_instance(std::span<const AgentSlot> agents,
                                  std::span<const FoundTask> tasks, const CostParams& params,
                                  const GridSpec& grid) {
  std::vector<AgentSlot> sorted(agents.begin(), agents.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const AgentSlot& a, const AgentSlot& b) { return a.agent_id < b.agent_id; });
  MultiInstance inst;
  inst.budgets.reserve(sorted.size());
  for (const AgentSlot& s : sorted) inst.budgets.push_back(std::max(0.0, s.budget));
  inst.items.reserve(tasks.size());
  for (const FoundTask& t : tasks) {
    MultiItem it;
    it.task_id = t.task_id;
    it.cost_from_drop = task_cost_from(grid.drop_box, t, params, grid);
    it.reward = t.reward;
    it.cost_from_agent.reserve(sorted.size());
    for (const AgentSlot& s : sorted) {
      it.cost_from_agent.push_back(task_cost_from(s.position, t, params, grid));
    }
    inst.items.push_back(std::move(it));
  }
  return inst;
}

int predict_reward_multi(std::span<const AgentSlot> agents, std::span<const FoundTask> tasks,
                         const CostParams& params, const GridSpec& grid,
                         const BudgetQuantizer& q) {
  return predict_reward_multi(make_multi_instance(agents, tasks, params, grid), q);
}

}  // namespace searchact
