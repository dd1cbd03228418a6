#include "searchact/planner.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "gtest/gtest.h"

namespace searchact {
namespace {

PlannerParams Params() {
  PlannerParams p;
  p.grid.drop_box = {55.0, 35.0};
  return p;
}

PlanContext At(CellIndex cell, double budget, const PlannerParams& p) {
  PlanContext ctx;
  ctx.my_position = cell_center(cell, p.grid);
  ctx.my_budget = budget;
  return ctx;
}

TrackedObject PointObject(int id, int points, CellIndex cell, const GridSpec& g) {
  return {ObjectClass{ObjectKind::Static, points},
          BeliefGrid::point_mass(id, ObjectKind::Static, g, cell)};
}

TrackedObject UniformObject(int id, int points, const GridSpec& g) {
  return {ObjectClass{ObjectKind::Static, points}, BeliefGrid::uniform(id, ObjectKind::Static, g)};
}

ExploreAction Walk(std::vector<CellIndex> path, double cost) {
  return ExploreAction{path, cost, path, false};
}

// Counts self-avoiding walks by trying every move string.
int CountWalks(int moves, std::set<std::vector<std::pair<int, int>>>* sets = nullptr) {
  constexpr int dc[4] = {1, -1, 0, 0};
  constexpr int dr[4] = {0, 0, 1, -1};
  int total = 1;
  for (int k = 0; k < moves; ++k) total *= 4;
  int ok = 0;
  for (int code = 0; code < total; ++code) {
    std::vector<std::pair<int, int>> seen{{0, 0}};
    int c = code;
    bool valid = true;
    for (int k = 0; k < moves && valid; ++k) {
      const auto [x, y] = seen.back();
      const std::pair<int, int> next{x + dc[c % 4], y + dr[c % 4]};
      c /= 4;
      valid = std::find(seen.begin(), seen.end(), next) == seen.end();
      seen.push_back(next);
    }
    ok += valid;
    if (valid && sets) {
      std::sort(seen.begin(), seen.end());
      sets->insert(seen);
    }
  }
  return ok;
}

int CountDistinctCellSets(int moves) {
  std::set<std::vector<std::pair<int, int>>> sets;
  CountWalks(moves, &sets);
  return static_cast<int>(sets.size());
}

std::size_t FromAgentCount(const std::vector<ExploreAction>& actions) {
  return static_cast<std::size_t>(std::count_if(
      actions.begin(), actions.end(), [](const ExploreAction& a) { return !a.from_best_cell; }));
}

bool IsFourConnected(const std::vector<CellIndex>& path) {
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (std::abs(path[i].col - path[i - 1].col) + std::abs(path[i].row - path[i - 1].row) != 1) {
      return false;
    }
  }
  return true;
}

TEST(Enumerate, HorizonThreeInteriorHasAllSelfAvoidingWalks) {
  PlannerParams p = Params();
  p.grid.width_m = 100.0;
  p.grid.height_m = 100.0;
  const PlanContext ctx = At({5, 5}, 1000.0, p);
  EXPECT_EQ(CountWalks(3), 36);
  EXPECT_EQ(self_avoiding_walks({5, 5}, p.grid, 3).size(), 36u);
  // Walks that sweep the same cells in a different order merge.
  EXPECT_EQ(CountDistinctCellSets(3), 32);
  const auto actions = enumerate_actions(ctx, p, 3);
  EXPECT_EQ(FromAgentCount(actions), 32u);
  for (const auto& a : actions) {
    EXPECT_TRUE(IsFourConnected(a.path));
    if (!a.from_best_cell) {
      EXPECT_EQ(a.path.front(), (CellIndex{5, 5}));
      EXPECT_EQ(a.path.size(), 4u);
      EXPECT_DOUBLE_EQ(a.cost, 15.0);
    }
  }
}

TEST(Enumerate, HorizonOneInteriorAndCorner) {
  const PlannerParams p = Params();
  PlanContext ctx = At({4, 3}, 1000.0, p);
  ctx.beliefs.push_back(PointObject(0, 2, {9, 0}, p.grid));
  auto actions = enumerate_actions(ctx, p, 1);
  EXPECT_EQ(FromAgentCount(actions), 4u);
  EXPECT_LE(actions.size() - FromAgentCount(actions), 4u);
  EXPECT_GE(actions.size(), 5u);

  ctx = At({0, 0}, 1000.0, p);
  ctx.beliefs.push_back(PointObject(0, 2, {9, 0}, p.grid));
  actions = enumerate_actions(ctx, p, 1);
  EXPECT_EQ(FromAgentCount(actions), 2u);
  EXPECT_LE(actions.size() - FromAgentCount(actions), 4u);
}

TEST(Enumerate, BestCellWalksStartAtHighestScoreAndPayTheLeg) {
  const PlannerParams p = Params();
  PlanContext ctx = At({0, 0}, 1000.0, p);
  ctx.beliefs.push_back(PointObject(0, 3, {7, 2}, p.grid));
  const auto actions = enumerate_actions(ctx, p, 2);
  int best = 0;
  for (const auto& a : actions) {
    if (!a.from_best_cell) continue;
    ++best;
    EXPECT_EQ(a.path.front(), (CellIndex{7, 2}));
    const double leg = distance(ctx.my_position, cell_center({7, 2}, p.grid)) / 2.0;
    EXPECT_DOUBLE_EQ(a.cost, leg + 5.0 * static_cast<double>(a.path.size() - 1));
    EXPECT_TRUE(IsFourConnected(a.path));
  }
  EXPECT_EQ(best, 4);
}

TEST(Enumerate, NoBestCellWalksWithoutScore) {
  const PlannerParams p = Params();
  const PlanContext ctx = At({4, 3}, 1000.0, p);
  const auto actions = enumerate_actions(ctx, p, 2);
  EXPECT_EQ(FromAgentCount(actions), actions.size());
}

TEST(Enumerate, ClaimedCellsDoNotAttractBestCellWalks) {
  const PlannerParams p = Params();
  PlanContext ctx = At({0, 0}, 1000.0, p);
  ctx.beliefs.push_back(PointObject(0, 3, {7, 2}, p.grid));
  ctx.claimed_cells.insert({7, 2});
  const auto actions = enumerate_actions(ctx, p, 2);
  EXPECT_EQ(FromAgentCount(actions), actions.size());
}

TEST(Enumerate, DuplicateCellSetsKeepCheapest) {
  const PlannerParams p = Params();
  // Agent in the best cell: its straight walks repeat some from-agent walks.
  PlanContext ctx = At({4, 3}, 1000.0, p);
  ctx.beliefs.push_back(PointObject(0, 3, {4, 3}, p.grid));
  const auto actions = enumerate_actions(ctx, p, 1);
  std::set<std::vector<CellIndex>> keys;
  for (const auto& a : actions) {
    auto k = a.cells_observed;
    std::sort(k.begin(), k.end());
    EXPECT_TRUE(keys.insert(k).second);
  }
  EXPECT_EQ(actions.size(), 4u);
}

TEST(Enumerate, RejectsZeroHorizon) {
  const PlannerParams p = Params();
  EXPECT_THROW(enumerate_actions(At({1, 1}, 10.0, p), p, 0), std::invalid_argument);
}

TEST(Evaluate, NothingOnPathNothingFoundIsZero) {
  const PlannerParams p = Params();
  PlanContext ctx = At({0, 0}, 500.0, p);
  ctx.beliefs.push_back(PointObject(0, 3, {9, 5}, p.grid));
  EXPECT_DOUBLE_EQ(evaluate_action(Walk({{0, 0}, {1, 0}}, 5.0), ctx, p), 0.0);
}

TEST(Evaluate, BudgetErosionLosesTheAtRiskTask) {
  const PlannerParams p = Params();
  PlanContext ctx = At({5, 3}, 0.0, p);
  const FoundTask t = make_found_task(0, {ObjectKind::Static, 2}, {8, 3}, 0.0, p.grid);
  const double c = task_cost_from(ctx.my_position, t, p.cost, p.grid);
  ctx.my_budget = c + 1.0;
  ctx.found_tasks.push_back(t);
  // J now: 2. After flying away for 5 s nothing fits: 0.
  EXPECT_DOUBLE_EQ(evaluate_action(Walk({{5, 3}, {4, 3}}, 5.0), ctx, p), -2.0);
}

TEST(Evaluate, CertainFindOfThreePointTask) {
  const PlannerParams p = Params();
  PlanContext ctx = At({5, 3}, 1000.0, p);
  ctx.beliefs.push_back(PointObject(0, 3, {6, 3}, p.grid));
  EXPECT_DOUBLE_EQ(evaluate_action(Walk({{6, 3}}, 5.0), ctx, p), 3.0);
}

TEST(Evaluate, UnaffordableIsInfeasible) {
  const PlannerParams p = Params();
  const PlanContext ctx = At({5, 3}, 5.0, p);
  EXPECT_EQ(evaluate_action(Walk({{5, 3}, {6, 3}}, 5.0), ctx, p), kInfeasibleAction);
}

TEST(Evaluate, ClaimedCellsAndTasksContributeNothing) {
  const PlannerParams p = Params();
  PlanContext ctx = At({5, 3}, 1000.0, p);
  ctx.beliefs.push_back(PointObject(0, 3, {6, 3}, p.grid));
  ctx.claimed_cells.insert({6, 3});
  EXPECT_DOUBLE_EQ(evaluate_action(Walk({{5, 3}, {6, 3}}, 5.0), ctx, p), 0.0);

  ctx.claimed_cells.clear();
  ctx.claimed_tasks.insert(0);
  EXPECT_DOUBLE_EQ(evaluate_action(Walk({{5, 3}, {6, 3}}, 5.0), ctx, p), 0.0);
}

TEST(Evaluate, HandComputedMixture) {
  const PlannerParams p = Params();
  PlanContext ctx = At({5, 3}, 1000.0, p);
  std::vector<double> probs(p.grid.cell_count(), 0.0);
  probs[p.grid.linear({6, 3})] = 0.25;
  probs[p.grid.linear({0, 0})] = 0.75;
  ctx.beliefs.push_back({ObjectClass{ObjectKind::Static, 2},
                         BeliefGrid(0, ObjectKind::Static, p.grid.cols(), p.grid.rows(), probs)});
  // 0.25 * (2 - 0) + 0.75 * (0 - 0)
  EXPECT_DOUBLE_EQ(evaluate_action(Walk({{5, 3}, {6, 3}}, 5.0), ctx, p), 0.5);
}

TEST(Evaluate, PeerBudgetCountsInPrediction) {
  const PlannerParams p = Params();
  PlanContext ctx = At({5, 3}, 0.0, p);
  const FoundTask t = make_found_task(0, {ObjectKind::Static, 2}, {5, 3}, 0.0, p.grid);
  ctx.my_budget = task_cost_from(ctx.my_position, t, p.cost, p.grid) + 1.0;
  ctx.found_tasks.push_back(t);
  ctx.peers.push_back({1, p.grid.drop_box, 1000.0, 0.0});
  // The peer can still deliver the task, so erosion of my budget costs nothing.
  EXPECT_DOUBLE_EQ(evaluate_action(Walk({{5, 3}, {4, 3}}, 5.0), ctx, p), 0.0);
  EXPECT_EQ(predicted_reward(ctx, p), 2);
}

TEST(Select, TightBudgetWithFoundTaskExecutes) {
  const PlannerParams p = Params();
  PlanContext ctx = At({5, 3}, 0.0, p);
  const FoundTask t = make_found_task(4, {ObjectKind::Static, 2}, {5, 3}, 0.0, p.grid);
  ctx.my_budget = task_cost_from(ctx.my_position, t, p.cost, p.grid) + 1.0;
  ctx.found_tasks.push_back(t);
  const Decision d = select_action(ctx, p, 3);
  ASSERT_TRUE(std::holds_alternative<ExecuteTask>(d.action));
  EXPECT_EQ(std::get<ExecuteTask>(d.action).task_id, 4);
  ASSERT_FALSE(d.top.empty());
  EXPECT_LT(d.top.front().value, 0.0);
}

TEST(Select, HighMassNearbyBeatsLowValueTask) {
  const PlannerParams p = Params();
  PlanContext ctx = At({5, 3}, 1000.0, p);
  ctx.found_tasks.push_back(make_found_task(9, {ObjectKind::Static, 1}, {0, 0}, 0.0, p.grid));
  ctx.beliefs.push_back(PointObject(0, 3, {6, 3}, p.grid));
  const Decision d = select_action(ctx, p, 1);
  ASSERT_TRUE(std::holds_alternative<ExploreAction>(d.action));
  const auto& a = std::get<ExploreAction>(d.action);
  EXPECT_NE(std::find(a.path.begin(), a.path.end(), CellIndex{6, 3}), a.path.end());
  EXPECT_DOUBLE_EQ(d.top.front().value, 3.0);
}

TEST(Select, EmptyFieldUniformBeliefExplores) {
  const PlannerParams p = Params();
  PlanContext ctx = At({5, 3}, 1000.0, p);
  for (int i = 0; i < 3; ++i) ctx.beliefs.push_back(UniformObject(i, i + 1, p.grid));
  const Decision d = select_action(ctx, p, 3);
  ASSERT_TRUE(std::holds_alternative<ExploreAction>(d.action));
  EXPECT_GE(d.top.front().value, 0.0);
  EXPECT_LE(d.top.size(), 5u);
  for (std::size_t i = 1; i < d.top.size(); ++i) EXPECT_GE(d.top[i - 1].value, d.top[i].value);
}

TEST(Select, NothingFeasibleAndNoTaskIdles) {
  const PlannerParams p = Params();
  const PlanContext ctx = At({5, 3}, 1.0, p);
  EXPECT_TRUE(std::holds_alternative<IdleAction>(select_action(ctx, p, 3).action));
}

TEST(Select, TiesPreferShorterThenLexicographicPath) {
  const PlannerParams p = Params();
  const PlanContext ctx = At({0, 0}, 1000.0, p);
  const Decision d = select_action(ctx, p, 2);
  ASSERT_TRUE(std::holds_alternative<ExploreAction>(d.action));
  const auto& chosen = std::get<ExploreAction>(d.action);
  auto all = enumerate_actions(ctx, p, 2);
  std::sort(all.begin(), all.end(), [](const ExploreAction& a, const ExploreAction& b) {
    if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
    return a.path < b.path;
  });
  EXPECT_EQ(chosen.path, all.front().path);
}

TEST(Replan, SecondAgentCannotTakeClaimedTask) {
  const PlannerParams p = Params();
  ClaimBoard board(2);
  const FoundTask t = make_found_task(7, {ObjectKind::Static, 3}, {5, 3}, 0.0, p.grid);

  PlanContext a = At({5, 3}, 0.0, p);
  a.my_id = 0;
  a.my_budget = task_cost_from(a.my_position, t, p.cost, p.grid) + 1.0;
  a.found_tasks = {t};
  const Decision da = replan(a, board, p, 3);
  ASSERT_TRUE(std::holds_alternative<ExecuteTask>(da.action));
  EXPECT_EQ(board.task_of(0), 7);

  PlanContext b = a;
  b.my_id = 1;
  const Decision db = replan(b, board, p, 3);
  if (const auto* e = std::get_if<ExecuteTask>(&db.action)) EXPECT_NE(e->task_id, 7);
  EXPECT_FALSE(board.has_duplicate_task_claims());
  EXPECT_THROW(board.post(1, ExecuteTask{7}), std::logic_error);
}

TEST(Replan, CrashedPeerIsDroppedAndItsTaskReleased) {
  const PlannerParams p = Params();
  ClaimBoard board(2);
  board.post(1, ExecuteTask{7});
  board.mark_crashed(1);

  const FoundTask t = make_found_task(7, {ObjectKind::Static, 3}, {5, 3}, 0.0, p.grid);
  PlanContext ctx = At({5, 3}, 0.0, p);
  ctx.my_budget = task_cost_from(ctx.my_position, t, p.cost, p.grid) + 1.0;
  ctx.found_tasks = {t};
  ctx.peers.push_back({1, p.grid.drop_box, 1000.0, 0.0});

  const Decision d = replan(ctx, board, p, 3);
  EXPECT_EQ(d.released, std::vector<int>{7});
  ASSERT_TRUE(std::holds_alternative<ExecuteTask>(d.action));
  EXPECT_EQ(std::get<ExecuteTask>(d.action).task_id, 7);
  EXPECT_FALSE(board.alive(1));
  EXPECT_FALSE(board.task_of(1).has_value());
}

TEST(Replan, CrashedPeerBudgetNoLongerCounts) {
  const PlannerParams p = Params();
  PlanContext ctx = At({5, 3}, 0.0, p);
  const FoundTask t = make_found_task(0, {ObjectKind::Static, 2}, {5, 3}, 0.0, p.grid);
  ctx.my_budget = task_cost_from(ctx.my_position, t, p.cost, p.grid) + 1.0;
  ctx.found_tasks.push_back(t);
  ctx.peers.push_back({1, p.grid.drop_box, 1000.0, 0.0});

  ClaimBoard healthy(2);
  EXPECT_TRUE(std::holds_alternative<ExploreAction>(replan(ctx, healthy, p, 3).action));

  ClaimBoard crashed(2);
  crashed.mark_crashed(1);
  EXPECT_TRUE(std::holds_alternative<ExecuteTask>(replan(ctx, crashed, p, 3).action));
}

TEST(Replan, SingleAgentMatchesSelect) {
  const PlannerParams p = Params();
  PlanContext ctx = At({2, 2}, 400.0, p);
  ctx.beliefs.push_back(UniformObject(0, 2, p.grid));
  ctx.found_tasks.push_back(make_found_task(5, {ObjectKind::Static, 1}, {3, 2}, 0.0, p.grid));
  ClaimBoard board(1);
  const Decision r = replan(ctx, board, p, 3);
  const Decision s = select_action(ctx, p, 3);
  ASSERT_EQ(r.action.index(), s.action.index());
  if (const auto* e = std::get_if<ExploreAction>(&r.action)) {
    EXPECT_EQ(e->path, std::get<ExploreAction>(s.action).path);
  }
}

TEST(ClaimBoard, ExploreClaimsCellsAndReleaseClears) {
  ClaimBoard board(3);
  board.post(0, Walk({{1, 1}, {1, 2}}, 5.0));
  EXPECT_EQ(board.claimed_cells(1), (std::set<CellIndex>{{1, 1}, {1, 2}}));
  EXPECT_TRUE(board.claimed_cells(0).empty());
  board.post(0, ExecuteTask{3});
  EXPECT_TRUE(board.claimed_cells(1).empty());
  EXPECT_EQ(board.claimed_tasks(2), std::set<int>{3});
  board.release(0);
  EXPECT_TRUE(board.claimed_tasks(2).empty());
}

// --- properties -----------------------------------------------------------

PlanContext RandomContext(std::mt19937_64& rng, const PlannerParams& p) {
  std::uniform_int_distribution<int> col(0, p.grid.cols() - 1), row(0, p.grid.rows() - 1),
      pts(1, 3), n(0, 4);
  std::uniform_real_distribution<double> budget(20.0, 600.0), u(0.0, 1.0);
  PlanContext ctx = At({col(rng), row(rng)}, budget(rng), p);
  const int objects = n(rng);
  for (int i = 0; i < objects; ++i) {
    std::vector<double> probs(p.grid.cell_count());
    for (double& x : probs) x = u(rng) < 0.2 ? u(rng) : 0.0;
    double s = 0.0;
    for (double x : probs) s += x;
    if (s == 0.0) probs[0] = s = 1.0;
    for (double& x : probs) x /= s;
    ctx.beliefs.push_back({ObjectClass{ObjectKind::Static, pts(rng)},
                           BeliefGrid(100 + i, ObjectKind::Static, p.grid.cols(), p.grid.rows(),
                                      probs)});
  }
  const int tasks = n(rng);
  for (int i = 0; i < tasks; ++i) {
    ctx.found_tasks.push_back(
        make_found_task(i, {ObjectKind::Static, pts(rng)}, {col(rng), row(rng)}, 0.0, p.grid));
  }
  if (u(rng) < 0.5) ctx.peers.push_back({1, p.grid.drop_box, budget(rng), 0.0});
  ctx.my_id = 0;
  return ctx;
}

TEST(PlannerProperty, RelabelingObjectsKeepsValues) {
  const PlannerParams p = Params();
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const PlanContext ctx = RandomContext(rng, p);
    PlanContext relabeled = ctx;
    std::reverse(relabeled.beliefs.begin(), relabeled.beliefs.end());
    for (std::size_t i = 0; i < relabeled.beliefs.size(); ++i) {
      const BeliefGrid& b = relabeled.beliefs[i].belief;
      relabeled.beliefs[i].belief =
          BeliefGrid(500 + static_cast<int>(i), b.kind(), b.cols(), b.rows(), std::vector<double>(b.probs().begin(), b.probs().end()));
    }
    for (const auto& a : enumerate_actions(ctx, p, 2)) {
      const double x = evaluate_action(a, ctx, p);
      const double y = evaluate_action(a, relabeled, p);
      if (x == kInfeasibleAction) EXPECT_EQ(y, kInfeasibleAction);
      else EXPECT_NEAR(x, y, 1e-9);
    }
  }
}

TEST(PlannerProperty, OffPathMassDoesNotMatter) {
  const PlannerParams p = Params();
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const PlanContext ctx = RandomContext(rng, p);
    for (const auto& a : enumerate_actions(ctx, p, 2)) {
      PlanContext stripped = ctx;
      for (auto& o : stripped.beliefs) {
        std::vector<double> probs(o.belief.probs().begin(), o.belief.probs().end());
        for (std::size_t i = 0; i < probs.size(); ++i) {
          const CellIndex c = p.grid.from_linear(i);
          if (std::find(a.cells_observed.begin(), a.cells_observed.end(), c) ==
              a.cells_observed.end()) {
            probs[i] = 0.0;
          }
        }
        o.belief = BeliefGrid(o.belief.object_id(), o.belief.kind(), o.belief.cols(),
                              o.belief.rows(), probs);
      }
      EXPECT_EQ(evaluate_action(a, ctx, p), evaluate_action(a, stripped, p));
    }
  }
}

TEST(PlannerProperty, SelectIsDeterministicAndReplanIdempotent) {
  const PlannerParams p = Params();
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    PlanContext ctx = RandomContext(rng, p);
    ctx.peers.clear();
    const Decision a = select_action(ctx, p, 3);
    const Decision b = select_action(ctx, p, 3);
    ASSERT_EQ(a.action.index(), b.action.index());
    ASSERT_EQ(a.top.size(), b.top.size());
    for (std::size_t i = 0; i < a.top.size(); ++i) {
      EXPECT_EQ(a.top[i].value, b.top[i].value);
      EXPECT_EQ(a.top[i].action.path, b.top[i].action.path);
    }
    ClaimBoard board(1);
    const Decision r1 = replan(ctx, board, p, 3);
    const Decision r2 = replan(ctx, board, p, 3);
    ASSERT_EQ(r1.action.index(), r2.action.index());
    if (const auto* e = std::get_if<ExploreAction>(&r1.action)) {
      EXPECT_EQ(e->path, std::get<ExploreAction>(r2.action).path);
    }
    if (const auto* e = std::get_if<ExecuteTask>(&r1.action)) {
      EXPECT_EQ(e->task_id, std::get<ExecuteTask>(r2.action).task_id);
    }
  }
}

TEST(PlannerProperty, ChosenExploreIsAffordableAndNonNegative) {
  const PlannerParams p = Params();
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const PlanContext ctx = RandomContext(rng, p);
    const Decision d = select_action(ctx, p, 3);
    if (const auto* e = std::get_if<ExploreAction>(&d.action)) {
      EXPECT_LT(e->cost, ctx.my_budget);
      EXPECT_GE(d.top.front().value, 0.0);
    }
  }
}

}  // namespace
}  // namespace searchact
