#include "searchact/tasks.hpp"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <stdexcept>

namespace searchact {

void ObjectClass::validate() const {
  if (points < 1 || points > 3) {
    throw std::invalid_argument("object class: points must be 1, 2 or 3");
  }
  if (kind == ObjectKind::Moving && points != 3) {
    throw std::invalid_argument("object class: moving objects are worth 3 points");
  }
}

void CostParams::validate() const {
  if (!(uav_speed > 0.0) || !(t_pick_static > 0.0) || !(t_pick_moving > 0.0) ||
      !(t_drop_static > 0.0) || !(t_drop_moving > 0.0)) {
    throw std::invalid_argument("cost params: speed and handling times must be positive");
  }
}

FoundTask make_found_task(int object_id, ObjectClass cls, CellIndex cell, double time,
                          const GridSpec& grid) {
  return FoundTask{object_id, cls, cell_center(cell, grid), time, cls.points};
}

bool is_expired(const FoundTask& task, double now, double timeout) {
  return task.cls.kind == ObjectKind::Moving && now - task.last_seen > timeout;
}

double task_cost_from(Position pos, const FoundTask& task, const CostParams& params,
                      const GridSpec& grid) {
  const double approach = travel_time(pos, task.est_pos, params.uav_speed);
  const double transfer = travel_time(task.est_pos, grid.drop_box, params.uav_speed);
  return approach + params.t_pick(task.cls.kind) + transfer + params.t_drop(task.cls.kind);
}

double task_cost_from(Position pos, const FoundTask& task, const CostParams& params,
                      const GridSpec& grid, TaskClock clock) {
  if (is_expired(task, clock.now, clock.tracking_timeout)) {
    throw std::domain_error("task_cost_from: moving task " + std::to_string(task.task_id) +
                            " has expired");
  }
  return task_cost_from(pos, task, params, grid);
}

std::vector<FoundTask> expire_moving(const std::vector<FoundTask>& tasks, double now,
                                     double timeout) {
  std::vector<FoundTask> kept;
  kept.reserve(tasks.size());
  std::copy_if(tasks.begin(), tasks.end(), std::back_inserter(kept),
               [&](const FoundTask& t) { return !is_expired(t, now, timeout); });
  return kept;
}

std::string describe(const FoundTask& task, const GridSpec& grid) {
  const CellIndex c = cell_of(task.est_pos, grid);
  char buf[128];
  std::snprintf(buf, sizeof buf, "(%d,%s,%d,%d:%d,%.6f)", task.task_id,
                std::string(to_string(task.cls.kind)).c_str(), task.cls.points, c.col, c.row,
                task.last_seen);
  return buf;
}

}  // namespace searchact
