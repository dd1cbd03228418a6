#include "searchact/arena_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace searchact {
namespace {

// Tolerance for "integer multiple of the cell size" and boundary membership.
constexpr double kGeomEps = 1e-9;

bool is_multiple(double value, double unit) {
  const double q = value / unit;
  return std::abs(q - std::round(q)) <= kGeomEps * std::max(1.0, std::abs(q));
}

}  // namespace

int GridSpec::cols() const { return static_cast<int>(std::lround(width_m / cell_size_m)); }

int GridSpec::rows() const { return static_cast<int>(std::lround(height_m / cell_size_m)); }

bool GridSpec::contains(Position p) const {
  return p.x >= 0.0 && p.y >= 0.0 && p.x <= width_m && p.y <= height_m;
}

bool GridSpec::is_valid(CellIndex c) const {
  return c.col >= 0 && c.row >= 0 && c.col < cols() && c.row < rows();
}

std::size_t GridSpec::linear(CellIndex c) const {
  return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols()) +
         static_cast<std::size_t>(c.col);
}

CellIndex GridSpec::from_linear(std::size_t idx) const {
  const auto n = static_cast<std::size_t>(cols());
  return CellIndex{static_cast<int>(idx % n), static_cast<int>(idx / n)};
}

void GridSpec::validate() const {
  if (!(cell_size_m > 0.0) || !std::isfinite(cell_size_m)) {
    throw std::invalid_argument("grid: cell_size_m must be positive");
  }
  if (!(width_m > 0.0) || !(height_m > 0.0)) {
    throw std::invalid_argument("grid: width_m and height_m must be positive");
  }
  if (!is_multiple(width_m, cell_size_m) || !is_multiple(height_m, cell_size_m)) {
    throw std::invalid_argument("grid: arena dimensions must be integer multiples of cell_size_m");
  }
  if (!contains(drop_box)) {
    throw std::invalid_argument("grid: drop box lies outside the arena");
  }
}

CellIndex cell_of(Position pos, const GridSpec& spec) {
  if (!spec.contains(pos)) {
    throw std::domain_error("cell_of: position (" + std::to_string(pos.x) + ", " +
                            std::to_string(pos.y) + ") is outside the arena");
  }
  int col = static_cast<int>(std::floor(pos.x / spec.cell_size_m));
  int row = static_cast<int>(std::floor(pos.y / spec.cell_size_m));
  col = std::min(col, spec.cols() - 1);
  row = std::min(row, spec.rows() - 1);
  return CellIndex{col, row};
}

Position cell_center(CellIndex cell, const GridSpec& spec) {
  if (!spec.is_valid(cell)) {
    throw std::domain_error("cell_center: cell (" + std::to_string(cell.col) + ", " +
                            std::to_string(cell.row) + ") is outside the grid");
  }
  return Position{(cell.col + 0.5) * spec.cell_size_m, (cell.row + 0.5) * spec.cell_size_m};
}

double distance(Position a, Position b) { return std::hypot(b.x - a.x, b.y - a.y); }

double travel_time(Position from, Position to, double speed) {
  if (!(speed > 0.0)) {
    throw std::domain_error("travel_time: speed must be positive");
  }
  return distance(from, to) / speed;
}

std::vector<CellIndex> neighbors(CellIndex cell, const GridSpec& spec, Connectivity connectivity) {
  if (!spec.is_valid(cell)) {
    throw std::domain_error("neighbors: invalid cell");
  }
  std::vector<CellIndex> out;
  out.reserve(8);
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      if (connectivity == Connectivity::Four && dr != 0 && dc != 0) continue;
      const CellIndex n{cell.col + dc, cell.row + dr};
      if (spec.is_valid(n)) out.push_back(n);
    }
  }
  return out;
}

}  // namespace searchact
