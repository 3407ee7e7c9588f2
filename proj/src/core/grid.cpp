#include "tat/core.hpp"

#include <algorithm>
#include <cmath>

namespace tat {

double distance(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double norm(const Point& a, int dim) { return std::sqrt(dot(a, a, dim)); }

Grid Grid::centered(int dim, int n, double extent, const Point& center) {
  Grid g;
  g.dim = dim;
  g.n = {n, n, dim == 3 ? n : 1};
  for (int a = 0; a < 3; ++a) {
    if (a < dim) {
      g.spacing[a] = extent / (n - 1);
      g.origin[a] = center[a] - 0.5 * extent;
    } else {
      g.spacing[a] = 1.0;
      g.origin[a] = 0.0;
    }
  }
  g.validate();
  return g;
}

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n[a]);
  return s;
}

void Grid::validate() const {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::tag_out_of_range, "grid dimension must be 2 or 3");
  for (int a = 0; a < dim; ++a) {
    if (n[a] < 2) throw Error(ErrorCode::invalid_argument, "grid needs at least 2 nodes per axis");
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
      throw Error(ErrorCode::invalid_argument, "grid spacing must be positive");
    if (!std::isfinite(origin[a])) throw Error(ErrorCode::invalid_argument, "grid origin must be finite");
  }
}

std::array<int, 3> Grid::unflatten(std::size_t flat) const {
  std::array<int, 3> ijk{0, 0, 0};
  if (dim == 2) {
    ijk[0] = static_cast<int>(flat / n[1]);
    ijk[1] = static_cast<int>(flat % n[1]);
  } else {
    ijk[2] = static_cast<int>(flat % n[2]);
    flat /= n[2];
    ijk[1] = static_cast<int>(flat % n[1]);
    ijk[0] = static_cast<int>(flat / n[1]);
  }
  return ijk;
}

Point Grid::node(std::size_t flat) const {
  auto ijk = unflatten(flat);
  return node(ijk[0], ijk[1], ijk[2]);
}

Point Grid::node(int i, int j, int k) const {
  Point p{origin[0] + i * spacing[0], origin[1] + j * spacing[1], 0.0};
  if (dim == 3) p[2] = origin[2] + k * spacing[2];
  return p;
}

bool Grid::operator==(const Grid& o) const {
  if (dim != o.dim) return false;
  for (int a = 0; a < dim; ++a)
    if (n[a] != o.n[a] || origin[a] != o.origin[a] || spacing[a] != o.spacing[a]) return false;
  return true;
}

ScalarField::ScalarField(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.size())
    throw Error(ErrorCode::validation, "field length " + std::to_string(values_.size()) +
                                           " does not match grid size " + std::to_string(grid_.size()));
  for (double v : values_)
    if (!std::isfinite(v)) throw Error(ErrorCode::numeric_failure, "non-finite value in field");
}

ScalarField ScalarField::zeros(const Grid& grid) { return ScalarField(grid, std::vector<double>(grid.size(), 0.0)); }

ScalarField ScalarField::constant(const Grid& grid, double value) {
  return ScalarField(grid, std::vector<double>(grid.size(), value));
}

double ScalarField::interpolate(const Point& x) const {
  const int d = grid_.dim;
  std::array<int, 3> i0{0, 0, 0};
  std::array<double, 3> w{0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) {
    double u = (x[a] - grid_.origin[a]) / grid_.spacing[a];
    if (u < 0.0 || u > grid_.n[a] - 1) return 0.0;
    // snap onto nodes so grid-conforming samples are exact
    double r = std::round(u);
    if (std::abs(u - r) < 1e-9) u = r;
    int i = std::min(static_cast<int>(std::floor(u)), grid_.n[a] - 2);
    i0[a] = i;
    w[a] = u - i;
  }
  if (d == 2) {
    const double* v = values_.data();
    const std::size_t ny = grid_.n[1];
    const std::size_t b = static_cast<std::size_t>(i0[0]) * ny + i0[1];
    return (1 - w[0]) * ((1 - w[1]) * v[b] + w[1] * v[b + 1]) +
           w[0] * ((1 - w[1]) * v[b + ny] + w[1] * v[b + ny + 1]);
  }
  double s = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        double wt = (a ? w[0] : 1 - w[0]) * (b ? w[1] : 1 - w[1]) * (c ? w[2] : 1 - w[2]);
        if (wt != 0.0) s += wt * values_[grid_.index(i0[0] + a, i0[1] + b, i0[2] + c)];
      }
  return s;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::min() const { return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end()); }

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace tat
