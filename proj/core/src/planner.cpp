#include "searchact/planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace searchact {
namespace {

// Cost standing in for "cannot be done by this agent in time".
constexpr double kUnreachable = 1e9;
constexpr double kTieEps = 1e-9;

struct Slot {
  int id = 0;
  Position position;
  double budget = 0.0;
  double ready_at = 0.0;
};

// Moving tasks only count as a first pickup by an agent that can commit to it
// before it expires; after a delivery it would long be lost.
MultiInstance build_instance(std::vector<Slot> slots, std::span<const FoundTask> tasks,
                             const PlannerParams& params) {
  std::stable_sort(slots.begin(), slots.end(),
                   [](const Slot& a, const Slot& b) { return a.id < b.id; });
  MultiInstance inst;
  for (const Slot& s : slots) inst.budgets.push_back(std::max(0.0, s.budget));
  for (const FoundTask& t : tasks) {
    const bool moving = t.cls.kind == ObjectKind::Moving;
    MultiItem it;
    it.task_id = t.task_id;
    it.reward = t.reward;
    // Every later pickup starts with another replan.
    it.cost_from_drop = moving ? kUnreachable
                               : task_cost_from(params.grid.drop_box, t, params.cost, params.grid) +
                                     params.calc_time;
    for (const Slot& s : slots) {
      const bool lost = moving && is_expired(t, s.ready_at, params.tracking_timeout);
      it.cost_from_agent.push_back(
          lost ? kUnreachable : task_cost_from(s.position, t, params.cost, params.grid));
    }
    inst.items.push_back(std::move(it));
  }
  return inst;
}

std::vector<Slot> peer_slots(const PlanContext& ctx) {
  std::vector<Slot> out;
  for (const PeerState& p : ctx.peers) out.push_back({p.agent_id, p.position, p.budget, p.ready_at});
  return out;
}

std::vector<FoundTask> selectable_tasks(const PlanContext& ctx) {
  std::vector<FoundTask> out;
  for (const FoundTask& t : ctx.found_tasks) {
    if (!ctx.claimed_tasks.contains(t.task_id)) out.push_back(t);
  }
  return out;
}

bool is_found(const PlanContext& ctx, int object_id) {
  return std::any_of(ctx.found_tasks.begin(), ctx.found_tasks.end(),
                     [&](const FoundTask& t) { return t.task_id == object_id; });
}

bool better(const ScoredAction& a, const ScoredAction& b) {
  if (std::abs(a.value - b.value) > kTieEps || std::isinf(a.value) || std::isinf(b.value)) {
    if (a.value != b.value) return a.value > b.value;
  }
  if (a.action.path.size() != b.action.path.size()) {
    return a.action.path.size() < b.action.path.size();
  }
  return a.action.path < b.action.path;
}

}  // namespace

std::vector<std::vector<CellIndex>> self_avoiding_walks(CellIndex start, const GridSpec& grid,
                                                        int moves) {
  std::vector<std::vector<CellIndex>> out;
  std::vector<CellIndex> path{start};
  auto dfs = [&](auto&& self) -> void {
    bool extended = false;
    if (static_cast<int>(path.size()) - 1 < moves) {
      for (const CellIndex n : neighbors(path.back(), grid, Connectivity::Four)) {
        if (std::find(path.begin(), path.end(), n) != path.end()) continue;
        extended = true;
        path.push_back(n);
        self(self);
        path.pop_back();
      }
    }
    if (!extended && path.size() > 1) out.push_back(path);
  };
  dfs(dfs);
  return out;
}

std::vector<ExploreAction> enumerate_actions(const PlanContext& ctx, const PlannerParams& params,
                                             int horizon) {
  if (horizon < 1) throw std::invalid_argument("enumerate_actions: horizon must be at least 1");
  const GridSpec& g = params.grid;
  const double step = g.cell_size_m / params.cost.uav_speed;
  std::vector<ExploreAction> raw;

  // Walks from the agent's own cell.
  const CellIndex start = cell_of(ctx.my_position, g);
  const double lead = travel_time(ctx.my_position, cell_center(start, g), params.cost.uav_speed);
  for (std::vector<CellIndex>& walk : self_avoiding_walks(start, g, horizon)) {
    const double cost = lead + static_cast<double>(walk.size() - 1) * step;
    raw.push_back(ExploreAction{walk, cost, walk, false});
  }

  // Straight sweeps from the most promising unclaimed cell.
  double best_score = 0.0;
  double best_dist = 0.0;
  std::optional<CellIndex> best;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const CellIndex c = g.from_linear(i);
    if (ctx.claimed_cells.contains(c)) continue;
    double score = 0.0;
    for (const TrackedObject& o : ctx.beliefs) {
      if (is_found(ctx, o.belief.object_id()) || ctx.claimed_tasks.contains(o.belief.object_id())) {
        continue;
      }
      score += o.belief.at_linear(i) * o.cls.points;
    }
    const double dist = distance(ctx.my_position, cell_center(c, g));
    if (score > best_score + kTieEps ||
        (best && score > best_score - kTieEps && dist < best_dist)) {
      best_score = std::max(best_score, score);
      best = c;
      best_dist = dist;
    }
  }
  if (best) {
    const double to_best = travel_time(ctx.my_position, cell_center(*best, g), params.cost.uav_speed);
    constexpr int kDirs[4][2] = {{0, -1}, {-1, 0}, {1, 0}, {0, 1}};
    for (const auto& d : kDirs) {
      std::vector<CellIndex> line{*best};
      for (int s = 0; s < horizon; ++s) {
        const CellIndex n{line.back().col + d[0], line.back().row + d[1]};
        if (!g.is_valid(n)) break;
        line.push_back(n);
      }
      const double cost = to_best + static_cast<double>(line.size() - 1) * step;
      raw.push_back(ExploreAction{line, cost, line, true});
    }
  }

  // Merge walks that observe the same cells.
  std::map<std::vector<CellIndex>, std::size_t> seen;
  std::vector<ExploreAction> out;
  for (ExploreAction& a : raw) {
    std::vector<CellIndex> key = a.cells_observed;
    std::sort(key.begin(), key.end());
    auto [it, inserted] = seen.emplace(std::move(key), out.size());
    if (inserted) {
      out.push_back(std::move(a));
    } else if (a.cost < out[it->second].cost) {
      out[it->second] = std::move(a);
    }
  }
  return out;
}

double evaluate_action(const ExploreAction& a, const PlanContext& ctx,
                       const PlannerParams& params) {
  RewardCache cache;
  return evaluate_action(a, ctx, params, cache);
}

double evaluate_action(const ExploreAction& a, const PlanContext& ctx, const PlannerParams& params,
                       RewardCache& cache) {
  if (!(a.cost < ctx.my_budget) || a.path.empty()) return kInfeasibleAction;
  const GridSpec& g = params.grid;
  const std::vector<FoundTask> tasks = selectable_tasks(ctx);
  const std::vector<Slot> peers = peer_slots(ctx);

  auto J = [&](const Slot& me, const std::vector<FoundTask>& ts) {
    std::vector<Slot> slots = peers;
    slots.push_back(me);
    return predict_reward_multi(build_instance(std::move(slots), ts, params), params.quantizer);
  };

  const std::array<long long, 6> now_key{-1, 0, 0, 0, 0, 0};
  auto it0 = cache.values.find(now_key);
  if (it0 == cache.values.end()) {
    it0 = cache.values
              .emplace(now_key, J(Slot{ctx.my_id, ctx.my_position, ctx.my_budget, ctx.now}, tasks))
              .first;
  }
  const int j_now = it0->second;

  const double next_decision = ctx.now + params.calc_time + a.cost;
  std::vector<FoundTask> after;
  for (const FoundTask& t : tasks) {
    if (!is_expired(t, next_decision, params.tracking_timeout)) after.push_back(t);
  }
  const CellIndex end_cell = a.path.back();
  const Slot me_after{ctx.my_id, cell_center(end_cell, g),
                      ctx.my_budget - a.cost - params.calc_time, next_decision};
  const long long budget_units = params.quantizer.budget_units(me_after.budget);

  auto J_after = [&](std::optional<FoundTask> extra) {
    std::array<long long, 6> key{static_cast<long long>(g.linear(end_cell)), budget_units,
                                 static_cast<long long>(after.size()), -1, 0, 0};
    if (extra) {
      key[3] = static_cast<long long>(g.linear(cell_of(extra->est_pos, g)));
      key[4] = extra->cls.points;
      key[5] = extra->cls.kind == ObjectKind::Moving ? 1 : 0;
    }
    if (auto hit = cache.values.find(key); hit != cache.values.end()) return hit->second;
    std::vector<FoundTask> ts = after;
    if (extra) ts.push_back(*extra);
    const int v = J(me_after, ts);
    cache.values.emplace(key, v);
    return v;
  };

  std::vector<CellIndex> cells;
  for (const CellIndex c : a.cells_observed) {
    if (!ctx.claimed_cells.contains(c)) cells.push_back(c);
  }

  double total_p = 0.0;
  double value = 0.0;
  for (const TrackedObject& o : ctx.beliefs) {
    const int id = o.belief.object_id();
    if (is_found(ctx, id) || ctx.claimed_tasks.contains(id)) continue;
    double p = 0.0;
    CellIndex where{};
    double where_mass = -1.0;
    for (const CellIndex c : cells) {
      const double m = o.belief.at(c);
      p += m;
      if (m > where_mass) {
        where_mass = m;
        where = c;
      }
    }
    if (p <= 0.0) continue;
    p = std::min(p, 1.0);
    total_p += p;
    const FoundTask hypothetical{id, o.cls, cell_center(where, g), next_decision, o.cls.points};
    value += p * (J_after(hypothetical) - j_now);
  }
  value += std::max(0.0, 1.0 - total_p) * (J_after(std::nullopt) - j_now);
  return value;
}

int predicted_reward(const PlanContext& ctx, const PlannerParams& params) {
  std::vector<Slot> slots = peer_slots(ctx);
  slots.push_back({ctx.my_id, ctx.my_position, ctx.my_budget, ctx.now});
  return predict_reward_multi(build_instance(std::move(slots), selectable_tasks(ctx), params),
                              params.quantizer);
}

Decision select_action(const PlanContext& ctx, const PlannerParams& params, int horizon) {
  RewardCache cache;
  std::vector<ScoredAction> scored;
  for (ExploreAction& a : enumerate_actions(ctx, params, horizon)) {
    const double v = evaluate_action(a, ctx, params, cache);
    scored.push_back({std::move(a), v});
  }
  std::sort(scored.begin(), scored.end(), better);

  Decision d;
  for (std::size_t i = 0; i < scored.size() && i < 5; ++i) d.top.push_back(scored[i]);

  if (!scored.empty() && scored.front().value != kInfeasibleAction &&
      scored.front().value >= 0.0) {
    d.action = scored.front().action;
    return d;
  }

  // Exploring loses predicted reward (or is impossible): start on the task the
  // reward prediction would pick up first.
  const std::vector<FoundTask> tasks = selectable_tasks(ctx);
  std::vector<Slot> slots = peer_slots(ctx);
  slots.push_back({ctx.my_id, ctx.my_position, ctx.my_budget, ctx.now});
  std::stable_sort(slots.begin(), slots.end(),
                   [](const Slot& a, const Slot& b) { return a.id < b.id; });
  const auto me = std::find_if(slots.begin(), slots.end(),
                               [&](const Slot& s) { return s.id == ctx.my_id; }) -
                  slots.begin();
  const Allocation alloc =
      allocate_sequential(build_instance(slots, tasks, params), params.quantizer);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (alloc.agent_of[i] == me && alloc.labels[i] == DecisionLabel::PickFirst) {
      d.action = ExecuteTask{tasks[i].task_id};
      return d;
    }
  }
  d.action = IdleAction{};
  return d;
}

// ---------------------------------------------------------------------------

ClaimBoard::ClaimBoard(int agents)
    : task_(static_cast<std::size_t>(agents)),
      cells_(static_cast<std::size_t>(agents)),
      crashed_(static_cast<std::size_t>(agents), false) {}

void ClaimBoard::post(int agent, const PlanAction& action) {
  if (crashed_.at(agent)) throw std::logic_error("ClaimBoard: crashed agent cannot claim");
  task_[agent].reset();
  cells_[agent].clear();
  if (const auto* t = std::get_if<ExecuteTask>(&action)) {
    for (std::size_t j = 0; j < task_.size(); ++j) {
      if (static_cast<int>(j) != agent && task_[j] == t->task_id) {
        throw std::logic_error("ClaimBoard: task " + std::to_string(t->task_id) +
                               " is already claimed by agent " + std::to_string(j));
      }
    }
    task_[agent] = t->task_id;
  } else if (const auto* e = std::get_if<ExploreAction>(&action)) {
    cells_[agent] = e->cells_observed;
  }
}

void ClaimBoard::release(int agent) {
  task_.at(agent).reset();
  cells_.at(agent).clear();
}

void ClaimBoard::mark_crashed(int agent) { crashed_.at(agent) = true; }

std::vector<int> ClaimBoard::acknowledge_crashes() {
  std::vector<int> dropped;
  for (std::size_t j = 0; j < task_.size(); ++j) {
    if (!crashed_[j]) continue;
    if (task_[j]) dropped.push_back(*task_[j]);
    task_[j].reset();
    cells_[j].clear();
  }
  return dropped;
}

std::set<int> ClaimBoard::claimed_tasks(int except) const {
  std::set<int> out;
  for (std::size_t j = 0; j < task_.size(); ++j) {
    if (static_cast<int>(j) != except && task_[j]) out.insert(*task_[j]);
  }
  return out;
}

std::set<CellIndex> ClaimBoard::claimed_cells(int except) const {
  std::set<CellIndex> out;
  for (std::size_t j = 0; j < cells_.size(); ++j) {
    if (static_cast<int>(j) != except) out.insert(cells_[j].begin(), cells_[j].end());
  }
  return out;
}

bool ClaimBoard::has_duplicate_task_claims() const {
  std::set<int> seen;
  for (const auto& t : task_) {
    if (t && !seen.insert(*t).second) return true;
  }
  return false;
}

Decision replan(PlanContext ctx, ClaimBoard& board, const PlannerParams& params, int horizon) {
  std::vector<int> released = board.acknowledge_crashes();
  std::erase_if(ctx.peers, [&](const PeerState& p) { return !board.alive(p.agent_id); });
  ctx.claimed_tasks = board.claimed_tasks(ctx.my_id);
  ctx.claimed_cells = board.claimed_cells(ctx.my_id);
  Decision d = select_action(ctx, params, horizon);
  board.post(ctx.my_id, d.action);
  d.released = std::move(released);
  return d;
}

}  // namespace searchact
