// Declarative phantoms built from analytic primitives.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tat/core.hpp"

namespace tat {

enum class Shape { disk, ball, rect, box, bump };

/// One analytic primitive. `size` holds the radius in size[0] for disk/ball/bump,
/// and the half-widths per axis for rect/box.
struct Primitive {
  Shape shape = Shape::disk;
  int dim = 2;
  Point center{0.0, 0.0, 0.0};
  Point size{0.0, 0.0, 0.0};
  double amp = 1.0;

  static Primitive disk(double cx, double cy, double r, double amp);
  static Primitive ball(double cx, double cy, double cz, double r, double amp);
  static Primitive bump2(double cx, double cy, double r, double amp);
  static Primitive bump3(double cx, double cy, double cz, double r, double amp);
  static Primitive rect(double cx, double cy, double hx, double hy, double amp);
  static Primitive box(double cx, double cy, double cz, double hx, double hy, double hz, double amp);

  double eval(const Point& x) const;
  /// Radius of the smallest centred ball containing the support.
  double bounding_radius() const;
  void validate() const;
};

struct PhantomSpec {
  std::vector<Primitive> primitives;

  /// Dimension of the primitives; 0 for an empty spec.
  int dim() const;
  PhantomSpec& add(const Primitive& p) {
    primitives.push_back(p);
    return *this;
  }
  PhantomSpec concat(const PhantomSpec& other) const;
  /// Mirror image about the line (2D) through `origin` with unit direction `dir`.
  PhantomSpec reflected(const Point& origin, const Point& dir) const;
  PhantomSpec scaled(double factor) const;
};

double eval_phantom(const PhantomSpec& spec, const Point& x);

/// Samples the phantom at every grid node. Primitives not fully covered by the
/// grid produce a message in `warnings` (if given) rather than an error.
ScalarField rasterize_phantom(const PhantomSpec& spec, const Grid& grid,
                              std::vector<std::string>* warnings = nullptr);

PhantomSpec parse_phantom(std::string_view text);
PhantomSpec read_phantom(const std::string& path);
std::string format_phantom(const PhantomSpec& spec);

}  // namespace tat
