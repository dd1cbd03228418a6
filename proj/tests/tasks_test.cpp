#include "searchact/tasks.hpp"

#include <random>

#include "gtest/gtest.h"

namespace searchact {
namespace {

constexpr ObjectClass kStatic1{ObjectKind::Static, 1};
constexpr ObjectClass kMoving3{ObjectKind::Moving, 3};

FoundTask TaskAt(int id, ObjectClass cls, Position p, double last_seen = 0.0) {
  return FoundTask{id, cls, p, last_seen, cls.points};
}

TEST(TaskCost, StaticFourTermSum) {
  const GridSpec g;  // drop box at (50, 30)
  const CostParams params;
  const FoundTask t = TaskAt(0, kStatic1, {10.0, 30.0});  // 40 m from the drop box
  EXPECT_DOUBLE_EQ(task_cost_from({10.0, 60.0}, t, params, g), 15.0 + 25.0 + 20.0 + 20.0);
}

TEST(TaskCost, ColocatedAtDropBox) {
  const GridSpec g;
  const CostParams params;
  EXPECT_DOUBLE_EQ(task_cost_from(g.drop_box, TaskAt(0, kMoving3, g.drop_box), params, g), 65.0);
  EXPECT_DOUBLE_EQ(task_cost_from(g.drop_box, TaskAt(0, kStatic1, g.drop_box), params, g), 45.0);
}

TEST(TaskCost, ExpiredMovingTaskThrows) {
  const GridSpec g;
  const CostParams params;
  const FoundTask t = TaskAt(3, kMoving3, {15.0, 15.0}, 10.0);
  EXPECT_NO_THROW(task_cost_from(g.drop_box, t, params, g, TaskClock{13.0, 4.0}));
  EXPECT_THROW(task_cost_from(g.drop_box, t, params, g, TaskClock{15.0, 4.0}), std::domain_error);
  // Static tasks never expire.
  const FoundTask s = TaskAt(4, kStatic1, {15.0, 15.0}, 0.0);
  EXPECT_NO_THROW(task_cost_from(g.drop_box, s, params, g, TaskClock{1000.0, 4.0}));
}

TEST(TaskCost, MinimizedAtTheTaskPositionAndMonotoneInDistance) {
  const GridSpec g;
  const CostParams params;
  const FoundTask t = TaskAt(0, kStatic1, {25.0, 45.0});
  const double at_task = task_cost_from(t.est_pos, t, params, g);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.0, 100.0), uy(0.0, 60.0);
  for (int i = 0; i < 500; ++i) {
    const Position p{ux(rng), uy(rng)};
    const double c = task_cost_from(p, t, params, g);
    EXPECT_GE(c, at_task);
    EXPECT_GT(c, 0.0);
    // Moving halfway toward the task never increases the cost.
    const Position mid{(p.x + t.est_pos.x) / 2, (p.y + t.est_pos.y) / 2};
    EXPECT_LE(task_cost_from(mid, t, params, g), c + 1e-12);
  }
}

TEST(ExpireMoving, Examples) {
  const std::vector<FoundTask> tasks{TaskAt(0, kMoving3, {5, 5}, 10.0)};
  EXPECT_TRUE(expire_moving(tasks, 15.0, 4.0).empty());
  EXPECT_EQ(expire_moving(tasks, 13.0, 4.0).size(), 1u);
  EXPECT_EQ(expire_moving(tasks, 14.0, 4.0).size(), 1u);  // exactly at the timeout
  const std::vector<FoundTask> fixed{TaskAt(1, kStatic1, {5, 5}, 0.0)};
  EXPECT_EQ(expire_moving(fixed, 1e6, 4.0).size(), 1u);
}

TEST(FoundTask, EstimateIsDetectionCellCenter) {
  const GridSpec g;
  const FoundTask t = make_found_task(9, ObjectClass{ObjectKind::Static, 2}, {3, 1}, 12.0, g);
  EXPECT_EQ(t.est_pos, (Position{35.0, 15.0}));
  EXPECT_EQ(t.reward, 2);
  EXPECT_EQ(describe(t, g), "(9,static,2,3:1,12.000000)");
}

TEST(ObjectClass, Validation) {
  EXPECT_NO_THROW(kMoving3.validate());
  EXPECT_THROW((ObjectClass{ObjectKind::Moving, 2}.validate()), std::invalid_argument);
  EXPECT_THROW((ObjectClass{ObjectKind::Static, 4}.validate()), std::invalid_argument);
  CostParams p;
  p.t_drop_moving = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace searchact
