#include "searchact/belief.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace searchact {
namespace {

// Below this much surviving mass a miss is treated as "everything observed".
constexpr double kDegenerateMass = 1e-12;

}  // namespace

std::string_view to_string(ObjectKind kind) {
  return kind == ObjectKind::Static ? "static" : "moving";
}

ObjectKind object_kind_from_string(std::string_view s) {
  if (s == "static") return ObjectKind::Static;
  if (s == "moving") return ObjectKind::Moving;
  throw std::invalid_argument("unknown object kind '" + std::string(s) + "'");
}

BeliefGrid::BeliefGrid(int object_id, ObjectKind kind, int cols, int rows,
                       std::vector<double> probs)
    : object_id_(object_id), kind_(kind), cols_(cols), rows_(rows), probs_(std::move(probs)) {
  if (cols <= 0 || rows <= 0 ||
      probs_.size() != static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows)) {
    throw std::invalid_argument("BeliefGrid: probability array does not match grid shape");
  }
}

BeliefGrid BeliefGrid::uniform(int object_id, ObjectKind kind, const GridSpec& spec) {
  const std::size_t n = spec.cell_count();
  return BeliefGrid(object_id, kind, spec.cols(), spec.rows(),
                    std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

BeliefGrid BeliefGrid::point_mass(int object_id, ObjectKind kind, const GridSpec& spec,
                                  CellIndex cell) {
  if (!spec.is_valid(cell)) throw std::domain_error("point_mass: invalid cell");
  std::vector<double> p(spec.cell_count(), 0.0);
  p[spec.linear(cell)] = 1.0;
  return BeliefGrid(object_id, kind, spec.cols(), spec.rows(), std::move(p));
}

std::size_t BeliefGrid::index(CellIndex c) const {
  if (c.col < 0 || c.row < 0 || c.col >= cols_ || c.row >= rows_) {
    throw std::domain_error("BeliefGrid: cell out of range");
  }
  return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols_) +
         static_cast<std::size_t>(c.col);
}

double BeliefGrid::at(CellIndex c) const { return probs_[index(c)]; }

double BeliefGrid::total() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

CellIndex BeliefGrid::argmax() const {
  const auto it = std::max_element(probs_.begin(), probs_.end());
  const auto i = static_cast<int>(std::distance(probs_.begin(), it));
  return CellIndex{i % cols_, i / cols_};
}

double p_out_for_speed(double object_speed, double cell_size_m, double step_dt) {
  if (!(cell_size_m > 0.0)) throw std::domain_error("p_out_for_speed: cell size must be positive");
  return std::clamp(object_speed * step_dt / cell_size_m, 0.0, 1.0);
}

BeliefGrid predict_static(const BeliefGrid& b) {
  if (b.kind() != ObjectKind::Static) {
    throw std::domain_error("predict_static: grid belongs to a moving object");
  }
  return b;
}

BeliefGrid predict_moving(const BeliefGrid& b, const MotionParams& params) {
  if (b.kind() != ObjectKind::Moving) {
    throw std::domain_error("predict_moving: grid belongs to a static object");
  }
  if (params.p_out < 0.0 || params.p_out > 1.0) {
    throw std::domain_error("predict_moving: p_out must lie in [0, 1]");
  }
  const int cols = b.cols();
  const int rows = b.rows();
  const double share = params.p_out / 8.0;
  std::vector<double> out(b.size(), 0.0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t src = static_cast<std::size_t>(r) * cols + c;
      const double m = b.at_linear(src);
      if (m == 0.0) continue;
      const double moved = m * share;
      double kept = m * (1.0 - params.p_out);
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int nr = r + dr;
          const int nc = c + dc;
          if (nr < 0 || nc < 0 || nr >= rows || nc >= cols) {
            kept += moved;
          } else {
            out[static_cast<std::size_t>(nr) * cols + nc] += moved;
          }
        }
      }
      out[src] += kept;
    }
  }
  return BeliefGrid(b.object_id(), b.kind(), cols, rows, std::move(out));
}

BeliefGrid measurement_update(const BeliefGrid& b, const Observation& obs) {
  if (obs.observed_cells.empty()) {
    throw std::invalid_argument("measurement_update: observation covers no cells");
  }
  const auto cols = static_cast<std::size_t>(b.cols());
  auto lin = [&](CellIndex c) {
    if (c.col < 0 || c.row < 0 || c.col >= b.cols() || c.row >= b.rows()) {
      throw std::domain_error("measurement_update: observed cell outside the grid");
    }
    return static_cast<std::size_t>(c.row) * cols + static_cast<std::size_t>(c.col);
  };

  std::vector<char> observed(b.size(), 0);
  for (const CellIndex c : obs.observed_cells) observed[lin(c)] = 1;

  for (const Detection& d : obs.detections) {
    if (d.object_id != b.object_id()) {
      throw std::domain_error("measurement_update: detection of object " +
                              std::to_string(d.object_id) + " applied to grid of object " +
                              std::to_string(b.object_id()));
    }
    if (!observed[lin(d.cell)]) {
      throw std::domain_error("measurement_update: detection outside the observed cells");
    }
  }
  if (!obs.detections.empty()) {
    std::vector<double> p(b.size(), 0.0);
    p[lin(obs.detections.front().cell)] = 1.0;
    return BeliefGrid(b.object_id(), b.kind(), b.cols(), b.rows(), std::move(p));
  }

  std::vector<double> p(b.probs().begin(), b.probs().end());
  double remaining = 0.0;
  std::size_t unobserved = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (observed[i]) {
      p[i] = 0.0;
    } else {
      remaining += p[i];
      ++unobserved;
    }
  }
  if (remaining > kDegenerateMass) {
    const double eta = 1.0 / remaining;
    for (double& v : p) v *= eta;
  } else if (unobserved > 0) {
    const double u = 1.0 / static_cast<double>(unobserved);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = observed[i] ? 0.0 : u;
  } else {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
  }
  return BeliefGrid(b.object_id(), b.kind(), b.cols(), b.rows(), std::move(p));
}

double mass_in(const BeliefGrid& b, std::span<const CellIndex> cells) {
  double m = 0.0;
  for (const CellIndex c : cells) m += b.at(c);
  return std::clamp(m, 0.0, 1.0);
}

std::string to_text(const BeliefGrid& b) {
  std::string out = "belief " + std::to_string(b.object_id()) + " " +
                    std::string(to_string(b.kind())) + " " + std::to_string(b.cols()) + " " +
                    std::to_string(b.rows()) + "\n";
  char buf[40];
  for (const double v : b.probs()) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out += buf;
  }
  return out;
}

BeliefGrid belief_from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string tag, kind;
  int id = 0, cols = 0, rows = 0;
  if (!(in >> tag >> id >> kind >> cols >> rows) || tag != "belief" || cols <= 0 || rows <= 0) {
    throw std::invalid_argument("belief_from_text: malformed header");
  }
  std::vector<double> p(static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows));
  for (double& v : p) {
    if (!(in >> v)) throw std::invalid_argument("belief_from_text: too few cell values");
  }
  return BeliefGrid(id, object_kind_from_string(kind), cols, rows, std::move(p));
}

}  // namespace searchact
