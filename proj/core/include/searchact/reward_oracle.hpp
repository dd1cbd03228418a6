#pragma once

#include <stdexcept>

#include "searchact/reward_dp.hpp"

namespace searchact {

/// Raised when an instance is too large to enumerate.
class OracleLimitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kOracleMaxSingleItems = 12;
inline constexpr std::size_t kOracleMaxMultiItems = 8;
inline constexpr std::size_t kOracleMaxAgents = 3;

// Exhaustive optimum for one agent, on unquantized costs. A nonempty subset S
// is feasible when some f in S gives c*_f + sum_{k in S, k != f} c_k <= budget.
int brute_force_oracle(const DpInstance& inst);

// Exhaustive multiple-knapsack optimum: every assignment of tasks to agents
// (or to nobody), each agent's subset feasible as above.
int brute_force_oracle(const MultiInstance& inst);

}  // namespace searchact
