#include "searchact/reward_oracle.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace searchact {
namespace {

constexpr double kFeasEps = 1e-9;

struct Bin {
  double sum_c = 0.0;
  double best_delta = std::numeric_limits<double>::infinity();
  int reward = 0;
  bool empty = true;
};

bool feasible(const Bin& b, double budget) {
  return b.empty || b.sum_c + b.best_delta <= budget + kFeasEps;
}

int search(const MultiInstance& inst, std::size_t i, std::vector<Bin>& bins) {
  if (i == inst.items.size()) {
    int total = 0;
    for (std::size_t j = 0; j < bins.size(); ++j) {
      if (!feasible(bins[j], inst.budgets[j])) return -1;
      total += bins[j].reward;
    }
    return total;
  }
  int best = search(inst, i + 1, bins);  // unassigned
  const MultiItem& it = inst.items[i];
  for (std::size_t j = 0; j < bins.size(); ++j) {
    const Bin saved = bins[j];
    Bin& b = bins[j];
    b.sum_c += it.cost_from_drop;
    b.best_delta = std::min(b.best_delta, it.cost_from_agent[j] - it.cost_from_drop);
    b.reward += it.reward;
    b.empty = false;
    best = std::max(best, search(inst, i + 1, bins));
    bins[j] = saved;
  }
  return best;
}

}  // namespace

int brute_force_oracle(const DpInstance& inst) {
  inst.validate();
  const std::size_t n = inst.items.size();
  if (n > kOracleMaxSingleItems) {
    throw OracleLimitError("brute_force_oracle: at most 12 tasks can be enumerated");
  }
  int best = 0;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    double sum_c = 0.0;
    int reward = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (mask & (1u << k)) {
        sum_c += inst.items[k].cost_from_drop;
        reward += inst.items[k].reward;
      }
    }
    if (reward <= best) continue;
    for (std::size_t f = 0; f < n; ++f) {
      if (!(mask & (1u << f))) continue;
      const double cost = sum_c - inst.items[f].cost_from_drop + inst.items[f].cost_from_agent;
      if (cost <= inst.budget + kFeasEps) {
        best = reward;
        break;
      }
    }
  }
  return best;
}

int brute_force_oracle(const MultiInstance& inst) {
  inst.validate();
  if (inst.items.size() > kOracleMaxMultiItems || inst.budgets.size() > kOracleMaxAgents) {
    throw OracleLimitError("brute_force_oracle: at most 8 tasks and 3 agents can be enumerated");
  }
  std::vector<Bin> bins(inst.budgets.size());
  return std::max(0, search(inst, 0, bins));
}

}  // namespace searchact
