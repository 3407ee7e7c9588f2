#include "tat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tat {

using std::numbers::pi;

const char* to_string(GeometryKind k) {
  switch (k) {
    case GeometryKind::circle: return "circle";
    case GeometryKind::arc: return "arc";
    case GeometryKind::sphere: return "sphere";
    case GeometryKind::square_boundary: return "square";
    case GeometryKind::cube_boundary: return "cube";
    case GeometryKind::line_segment: return "line";
  }
  return "?";
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    nodes[i] = -z;
    nodes[n - 1 - i] = z;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

namespace {

void require(bool ok, const char* why) {
  if (!ok) throw Error(ErrorCode::invalid_argument, why);
}

}  // namespace

DetectorGeometry DetectorGeometry::circle(const Point& center, double radius, int n, double angle0) {
  require(radius > 0.0, "circle radius must be positive");
  require(n >= 1, "need at least one detector");
  DetectorGeometry g;
  g.kind_ = GeometryKind::circle;
  g.dim_ = 2;
  g.center_ = {center[0], center[1], 0.0};
  g.size_ = radius;
  g.angle0_ = angle0;
  g.span_ = 2.0 * pi;
  g.n_aux_ = 0;
  for (int i = 0; i < n; ++i) {
    double th = angle0 + 2.0 * pi * i / n;
    Point nrm{std::cos(th), std::sin(th), 0.0};
    g.normals_.push_back(nrm);
    g.positions_.push_back({center[0] + radius * nrm[0], center[1] + radius * nrm[1], 0.0});
    g.weights_.push_back(2.0 * pi * radius / n);
  }
  return g;
}

DetectorGeometry DetectorGeometry::arc(const Point& center, double radius, double angle0, double span, int n) {
  require(radius > 0.0, "arc radius must be positive");
  require(n >= 1, "need at least one detector");
  require(span >= 0.0 && span <= 2.0 * pi, "arc span must lie in [0, 2*pi]");
  DetectorGeometry g;
  g.kind_ = GeometryKind::arc;
  g.dim_ = 2;
  g.center_ = {center[0], center[1], 0.0};
  g.size_ = radius;
  g.angle0_ = angle0;
  g.span_ = span;
  for (int i = 0; i < n; ++i) {
    double th = n == 1 ? angle0 : angle0 + span * i / (n - 1);
    Point nrm{std::cos(th), std::sin(th), 0.0};
    g.normals_.push_back(nrm);
    g.positions_.push_back({center[0] + radius * nrm[0], center[1] + radius * nrm[1], 0.0});
    double w = n == 1 ? 0.0 : span * radius / (n - 1);
    if (i == 0 || i == n - 1) w *= 0.5;
    g.weights_.push_back(w);
  }
  return g;
}

DetectorGeometry DetectorGeometry::sphere(const Point& center, double radius, int n_lat, int n_lon) {
  require(radius > 0.0, "sphere radius must be positive");
  require(n_lat >= 1 && n_lon >= 1, "need at least one latitude and longitude");
  DetectorGeometry g;
  g.kind_ = GeometryKind::sphere;
  g.dim_ = 3;
  g.center_ = center;
  g.size_ = radius;
  g.span_ = 4.0 * pi;
  g.n_aux_ = static_cast<std::uint32_t>(n_lon);
  std::vector<double> z, w;
  gauss_legendre(n_lat, z, w);
  for (int j = 0; j < n_lat; ++j) {
    double s = std::sqrt(std::max(0.0, 1.0 - z[j] * z[j]));
    for (int k = 0; k < n_lon; ++k) {
      double ph = 2.0 * pi * k / n_lon;
      Point nrm{s * std::cos(ph), s * std::sin(ph), z[j]};
      g.normals_.push_back(nrm);
      g.positions_.push_back(
          {center[0] + radius * nrm[0], center[1] + radius * nrm[1], center[2] + radius * nrm[2]});
      g.weights_.push_back(radius * radius * w[j] * 2.0 * pi / n_lon);
    }
  }
  return g;
}

namespace {

DetectorGeometry box_boundary(GeometryKind kind, int dim, const Point& center, double a, int n) {
  require(a > 0.0, "half side must be positive");
  require(n >= 3, "box boundary needs at least 3 nodes per side");
  return DetectorGeometry::from_parameters(kind, dim, center, a, 0.0, 0.0, 0, static_cast<std::uint32_t>(n));
}

}  // namespace

DetectorGeometry DetectorGeometry::square_boundary(const Point& center, double half_side, int nodes_per_side) {
  return box_boundary(GeometryKind::square_boundary, 2, {center[0], center[1], 0.0}, half_side, nodes_per_side);
}

DetectorGeometry DetectorGeometry::cube_boundary(const Point& center, double half_side, int nodes_per_side) {
  return box_boundary(GeometryKind::cube_boundary, 3, center, half_side, nodes_per_side);
}

DetectorGeometry DetectorGeometry::line_segment(const Point& center, double half_length, double angle, int n) {
  require(half_length > 0.0, "segment half length must be positive");
  require(n >= 2, "segment needs at least two detectors");
  DetectorGeometry g;
  g.kind_ = GeometryKind::line_segment;
  g.dim_ = 2;
  g.center_ = {center[0], center[1], 0.0};
  g.size_ = half_length;
  g.angle0_ = angle;
  const double c = std::cos(angle), s = std::sin(angle);
  for (int i = 0; i < n; ++i) {
    double t = -half_length + 2.0 * half_length * i / (n - 1);
    g.positions_.push_back({center[0] + t * c, center[1] + t * s, 0.0});
    g.normals_.push_back({-s, c, 0.0});
    double w = 2.0 * half_length / (n - 1);
    g.weights_.push_back((i == 0 || i == n - 1) ? 0.5 * w : w);
  }
  return g;
}

DetectorGeometry DetectorGeometry::from_parameters(GeometryKind kind, int dim, const Point& center, double size,
                                                   double angle0, double span, std::uint32_t n_detectors,
                                                   std::uint32_t n_aux) {
  switch (kind) {
    case GeometryKind::circle:
      if (dim != 2) break;
      return circle(center, size, static_cast<int>(n_detectors), angle0);
    case GeometryKind::arc:
      if (dim != 2) break;
      return arc(center, size, angle0, span, static_cast<int>(n_detectors));
    case GeometryKind::sphere:
      if (dim != 3 || n_aux == 0 || n_detectors % n_aux != 0) break;
      return sphere(center, size, static_cast<int>(n_detectors / n_aux), static_cast<int>(n_aux));
    case GeometryKind::line_segment:
      if (dim != 2) break;
      return line_segment(center, size, angle0, static_cast<int>(n_detectors));
    case GeometryKind::square_boundary:
    case GeometryKind::cube_boundary: {
      if ((kind == GeometryKind::square_boundary) != (dim == 2)) break;
      if (dim != 2 && dim != 3) break;
      require(size > 0.0 && n_aux >= 3, "box boundary needs positive half side and >= 3 nodes per side");
      DetectorGeometry g;
      g.kind_ = kind;
      g.dim_ = dim;
      g.center_ = center;
      if (dim == 2) g.center_[2] = 0.0;
      g.size_ = size;
      g.n_aux_ = n_aux;
      const int n = static_cast<int>(n_aux);
      const double h = 2.0 * size / (n - 1);
      const int nk = dim == 3 ? n : 1;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < nk; ++k) {
            std::array<int, 3> ijk{i, j, k};
            Point nrm{0.0, 0.0, 0.0};
            int faces = 0;
            for (int a = 0; a < dim; ++a) {
              if (ijk[a] == 0) nrm[a] = -1.0, ++faces;
              if (ijk[a] == n - 1) nrm[a] = 1.0, ++faces;
            }
            if (faces == 0) continue;
            double len = std::sqrt(static_cast<double>(faces));
            for (double& c : nrm) c /= len;
            Point p{center[0] - size + i * h, center[1] - size + j * h, 0.0};
            if (dim == 3) p[2] = center[2] - size + k * h;
            g.positions_.push_back(p);
            g.normals_.push_back(nrm);
            double w = dim == 2 ? h : h * h;
            if (dim == 3 && faces == 3) w *= 0.75;
            g.weights_.push_back(w);
          }
      if (n_detectors != 0 && n_detectors != g.positions_.size())
        throw Error(ErrorCode::validation, "detector count does not match box boundary layout");
      return g;
    }
  }
  throw Error(ErrorCode::tag_out_of_range, std::string("geometry kind ") + to_string(kind) +
                                               " is inconsistent with dimension " + std::to_string(dim));
}

Grid DetectorGeometry::node_grid() const {
  if (!is_box_boundary()) throw Error(ErrorCode::unsupported_geometry, "node grid only exists for box boundaries");
  Grid g = Grid::centered(dim_, static_cast<int>(n_aux_), 2.0 * size_, center_);
  return g;
}

std::vector<int> DetectorGeometry::node_lookup() const {
  Grid g = node_grid();
  std::vector<int> lut(g.size(), -1);
  const int n = static_cast<int>(n_aux_);
  int next = 0;
  for (std::size_t f = 0; f < g.size(); ++f) {
    auto ijk = g.unflatten(f);
    bool on = false;
    for (int a = 0; a < dim_; ++a) on = on || ijk[a] == 0 || ijk[a] == n - 1;
    if (on) lut[f] = next++;
  }
  return lut;
}

double DetectorGeometry::surface_residual() const {
  double worst = 0.0;
  for (const auto& p : positions_) {
    double r = 0.0;
    switch (kind_) {
      case GeometryKind::circle:
      case GeometryKind::arc:
      case GeometryKind::sphere: r = std::abs(distance(p, center_, dim_) - size_); break;
      case GeometryKind::square_boundary:
      case GeometryKind::cube_boundary: {
        double m = 0.0;
        for (int a = 0; a < dim_; ++a) m = std::max(m, std::abs(p[a] - center_[a]));
        r = std::abs(m - size_);
        break;
      }
      case GeometryKind::line_segment: {
        double dx = p[0] - center_[0], dy = p[1] - center_[1];
        r = std::abs(-std::sin(angle0_) * dx + std::cos(angle0_) * dy);
        break;
      }
    }
    worst = std::max(worst, r);
  }
  return worst;
}

bool DetectorGeometry::operator==(const DetectorGeometry& o) const {
  return kind_ == o.kind_ && dim_ == o.dim_ && center_ == o.center_ && size_ == o.size_ && angle0_ == o.angle0_ &&
         span_ == o.span_ && n_aux_ == o.n_aux_ && positions_.size() == o.positions_.size();
}

}  // namespace tat
