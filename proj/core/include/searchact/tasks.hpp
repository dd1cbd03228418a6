#pragma once

#include <string>
#include <vector>

#include "searchact/arena_grid.hpp"
#include "searchact/belief.hpp"

namespace searchact {

/// Object category: static objects score 1-3 points, moving objects score 3.
struct ObjectClass {
  ObjectKind kind = ObjectKind::Static;
  int points = 1;

  void validate() const;
  friend bool operator==(const ObjectClass&, const ObjectClass&) = default;
};

/// Pickup-and-delivery timing constants, seconds and m/s.
struct CostParams {
  double uav_speed = 2.0;
  double t_pick_static = 25.0;
  double t_pick_moving = 45.0;
  double t_drop_static = 20.0;
  double t_drop_moving = 20.0;

  double t_pick(ObjectKind kind) const {
    return kind == ObjectKind::Static ? t_pick_static : t_pick_moving;
  }
  double t_drop(ObjectKind kind) const {
    return kind == ObjectKind::Static ? t_drop_static : t_drop_moving;
  }
  void validate() const;
};

/// A located object that can be picked up. The task id is the object id.
struct FoundTask {
  int task_id = -1;
  ObjectClass cls;
  Position est_pos;
  double last_seen = 0.0;
  int reward = 0;

  friend bool operator==(const FoundTask&, const FoundTask&) = default;
};

/// Builds a task for an object detected in `cell` at `time`; the position
/// estimate is the cell center and the reward is the class points.
FoundTask make_found_task(int object_id, ObjectClass cls, CellIndex cell, double time,
                          const GridSpec& grid);

bool is_expired(const FoundTask& task, double now, double timeout);

/// approach + pick + transfer + drop, starting from `pos`.
double task_cost_from(Position pos, const FoundTask& task, const CostParams& params,
                      const GridSpec& grid);

struct TaskClock {
  double now = 0.0;
  double tracking_timeout = 4.0;
};

/// As above, but throws std::domain_error for a moving task that has expired at `clock.now`.
double task_cost_from(Position pos, const FoundTask& task, const CostParams& params,
                      const GridSpec& grid, TaskClock clock);

/// Drops moving tasks unseen for longer than `timeout`. Static tasks never expire.
std::vector<FoundTask> expire_moving(const std::vector<FoundTask>& tasks, double now,
                                     double timeout);

/// `(task_id, class, points, cell, last_seen)` tuple used in replay logs.
std::string describe(const FoundTask& task, const GridSpec& grid);

}  // namespace searchact
