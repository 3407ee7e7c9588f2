// Grids, scalar fields and the error type shared by every tat module.
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tat {

enum class ErrorCode {
  invalid_argument,
  bad_magic,
  truncated,
  tag_out_of_range,
  validation,
  io,
  dimension_mismatch,
  unsupported_geometry,
  unsupported_conversion,
  numeric_failure,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Points always carry three coordinates; the third is 0 in 2D.
using Point = std::array<double, 3>;

inline double dot(const Point& a, const Point& b, int dim = 3) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}
double distance(const Point& a, const Point& b, int dim = 3);
double norm(const Point& a, int dim = 3);

/// Node-centred uniform Cartesian grid. Axis 0 varies slowest in storage.
struct Grid {
  int dim = 2;
  std::array<int, 3> n{1, 1, 1};
  Point origin{0.0, 0.0, 0.0};
  Point spacing{1.0, 1.0, 1.0};

  /// n nodes per axis spanning [center - extent/2, center + extent/2].
  static Grid centered(int dim, int n, double extent, const Point& center = {0.0, 0.0, 0.0});

  std::size_t size() const;
  void validate() const;
  double extent(int axis) const { return (n[axis] - 1) * spacing[axis]; }
  Point node(std::size_t flat) const;
  Point node(int i, int j, int k = 0) const;
  std::size_t index(int i, int j, int k = 0) const {
    return dim == 2 ? static_cast<std::size_t>(i) * n[1] + j
                    : (static_cast<std::size_t>(i) * n[1] + j) * n[2] + k;
  }
  std::array<int, 3> unflatten(std::size_t flat) const;
  bool operator==(const Grid& o) const;
};

/// Immutable samples of a real function on a Grid.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(Grid grid, std::vector<double> values);
  static ScalarField zeros(const Grid& grid);
  static ScalarField constant(const Grid& grid, double value);

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double at(int i, int j, int k = 0) const { return values_[grid_.index(i, j, k)]; }
  std::size_t size() const { return values_.size(); }

  /// Multilinear interpolation; 0 outside the grid.
  double interpolate(const Point& x) const;
  double max_abs() const;
  double min() const;
  double max() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

double l2_norm(std::span<const double> v);

}  // namespace tat
