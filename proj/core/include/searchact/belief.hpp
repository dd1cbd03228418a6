#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "searchact/arena_grid.hpp"

namespace searchact {

enum class ObjectKind { Static, Moving };

std::string_view to_string(ObjectKind kind);
ObjectKind object_kind_from_string(std::string_view s);

/// Discrete probability density map for one object over the arena cells.
///
/// Entries are stored row-major. A live grid sums to 1; operations return new
/// grids rather than mutating in place.
class BeliefGrid {
 public:
  BeliefGrid() = default;
  BeliefGrid(int object_id, ObjectKind kind, int cols, int rows, std::vector<double> probs);

  static BeliefGrid uniform(int object_id, ObjectKind kind, const GridSpec& spec);
  static BeliefGrid point_mass(int object_id, ObjectKind kind, const GridSpec& spec,
                               CellIndex cell);

  int object_id() const { return object_id_; }
  ObjectKind kind() const { return kind_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  std::size_t size() const { return probs_.size(); }

  double at(CellIndex c) const;
  double at_linear(std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  double total() const;
  /// Cell holding the largest mass; ties go to the lowest row-major index.
  CellIndex argmax() const;

  friend bool operator==(const BeliefGrid&, const BeliefGrid&) = default;

 private:
  std::size_t index(CellIndex c) const;

  int object_id_ = -1;
  ObjectKind kind_ = ObjectKind::Static;
  int cols_ = 0;
  int rows_ = 0;
  std::vector<double> probs_;
};

struct MotionParams {
  double p_out = 0.1;   // mass leaving a cell per predict step
  double step_dt = 1.0; // seconds per predict step
};

/// p_out for an object crossing cells of the given size at the given speed,
/// clamped to [0, 1].
double p_out_for_speed(double object_speed, double cell_size_m, double step_dt);

struct Detection {
  int object_id = -1;
  CellIndex cell;
};

struct Observation {
  std::vector<CellIndex> observed_cells;
  std::vector<Detection> detections;
  double time = 0.0;
};

BeliefGrid predict_static(const BeliefGrid& b);

// One random-walk step on the 8-connected neighborhood: each cell keeps
// 1 - p_out and sends p_out / 8 to each neighbor. Shares aimed outside the
// arena stay in the source cell.
BeliefGrid predict_moving(const BeliefGrid& b, const MotionParams& params);

// Perfect-detection update. A detection collapses the grid onto the detection
// cell; a miss zeroes the observed cells and renormalizes. If nothing is left
// to renormalize, the grid resets to uniform over unobserved cells (or over
// all cells when everything was observed).
//
// Every detection in `obs` must refer to b.object_id().
BeliefGrid measurement_update(const BeliefGrid& b, const Observation& obs);

double mass_in(const BeliefGrid& b, std::span<const CellIndex> cells);

/// Header line `belief <id> <kind> <cols> <rows>` followed by one value per line.
std::string to_text(const BeliefGrid& b);
BeliefGrid belief_from_text(std::string_view text);

}  // namespace searchact
