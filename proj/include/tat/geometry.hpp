// Transducer layouts: circles, arcs, spheres, square/cube boundaries and line segments.
#pragma once

#include <cstdint>
#include <vector>

#include "tat/core.hpp"

namespace tat {

enum class GeometryKind : std::uint8_t {
  circle = 0,
  arc = 1,
  sphere = 2,
  square_boundary = 3,
  cube_boundary = 4,
  line_segment = 5,
};

const char* to_string(GeometryKind k);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// A detector set S together with per-detector outward normals and surface
/// quadrature weights (arc length in 2D, area in 3D).
///
/// Layouts are fully determined by (kind, dim, center, size, angle0, span,
/// n_detectors, n_aux), which is what the data file stores:
///  - circle: n_detectors at angle0 + 2*pi*i/n.
///  - arc: n_detectors evenly spread over [angle0, angle0 + span].
///  - sphere: n_aux longitudes times n_detectors/n_aux Gauss-Legendre latitudes.
///  - square/cube boundary: the boundary nodes of an n_aux^dim grid spanning
///    [center - size, center + size] per axis, in row-major node order.
///  - line segment: n_detectors evenly spread over center +- size*(cos angle0, sin angle0).
class DetectorGeometry {
 public:
  static DetectorGeometry circle(const Point& center, double radius, int n, double angle0 = 0.0);
  static DetectorGeometry arc(const Point& center, double radius, double angle0, double span, int n);
  static DetectorGeometry sphere(const Point& center, double radius, int n_lat, int n_lon);
  static DetectorGeometry square_boundary(const Point& center, double half_side, int nodes_per_side);
  static DetectorGeometry cube_boundary(const Point& center, double half_side, int nodes_per_side);
  static DetectorGeometry line_segment(const Point& center, double half_length, double angle, int n);
  static DetectorGeometry from_parameters(GeometryKind kind, int dim, const Point& center, double size,
                                          double angle0, double span, std::uint32_t n_detectors,
                                          std::uint32_t n_aux);

  GeometryKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Point& center() const { return center_; }
  /// Radius, half side or half length depending on kind.
  double size() const { return size_; }
  double angle0() const { return angle0_; }
  double span() const { return span_; }
  std::uint32_t n_aux() const { return n_aux_; }
  std::size_t count() const { return positions_.size(); }

  const std::vector<Point>& positions() const { return positions_; }
  const std::vector<Point>& normals() const { return normals_; }
  const std::vector<double>& weights() const { return weights_; }

  bool is_closed_sphere() const { return kind_ == GeometryKind::circle || kind_ == GeometryKind::sphere; }
  bool is_box_boundary() const {
    return kind_ == GeometryKind::square_boundary || kind_ == GeometryKind::cube_boundary;
  }
  /// For square/cube boundaries: the node grid whose boundary carries the detectors.
  Grid node_grid() const;
  /// For square/cube boundaries: detector index of each node of node_grid(), or -1 for interior nodes.
  std::vector<int> node_lookup() const;

  /// Largest distance between the defining surface equation and any detector.
  double surface_residual() const;

  bool operator==(const DetectorGeometry& o) const;

 private:
  GeometryKind kind_ = GeometryKind::circle;
  int dim_ = 2;
  Point center_{0.0, 0.0, 0.0};
  double size_ = 1.0;
  double angle0_ = 0.0;
  double span_ = 0.0;
  std::uint32_t n_aux_ = 0;
  std::vector<Point> positions_, normals_;
  std::vector<double> weights_;
};

}  // namespace tat
