#pragma once

#include <compare>
#include <cstddef>
#include <vector>

namespace searchact {

/// Continuous position in the arena frame, meters. Origin at the lower-left corner.
struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

struct CellIndex {
  int col = 0;
  int row = 0;

  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

enum class Connectivity { Four, Eight };

/// Rectangular arena discretized into square cells.
///
/// Width and height must be positive integer multiples of the cell size and the
/// drop box must lie inside the rectangle; validate() enforces both.
struct GridSpec {
  double width_m = 100.0;
  double height_m = 60.0;
  double cell_size_m = 10.0;
  Position drop_box{50.0, 30.0};

  int cols() const;
  int rows() const;
  std::size_t cell_count() const { return static_cast<std::size_t>(cols()) * rows(); }

  bool contains(Position p) const;
  bool is_valid(CellIndex c) const;

  /// Row-major linear index, row * cols + col.
  std::size_t linear(CellIndex c) const;
  CellIndex from_linear(std::size_t idx) const;

  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
};

// Points on a shared cell boundary map to the higher-index cell; points on the
// outer right/top edge map to the last column/row.
CellIndex cell_of(Position pos, const GridSpec& spec);

Position cell_center(CellIndex cell, const GridSpec& spec);

double distance(Position a, Position b);

/// Euclidean travel time at constant speed.
double travel_time(Position from, Position to, double speed);

std::vector<CellIndex> neighbors(CellIndex cell, const GridSpec& spec, Connectivity connectivity);

}  // namespace searchact
