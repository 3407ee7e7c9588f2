// Spherical-mean / spherical-integral data from phantoms, closed-form oracles,
// and the moment polynomials Q_k.
#pragma once

#include <functional>
#include <map>

#include "tat/phantom.hpp"
#include "tat/tatdata.hpp"

namespace tat {

enum class QuadratureMode {
  /// multilinear interpolation of a ScalarField, 0 outside the grid
  grid_interpolated,
  /// exact phantom values at the quadrature nodes
  analytic_phantom,
  /// closed-form sphere integrals for disks, balls and bumps; other shapes fall
  /// back to analytic_phantom quadrature
  closed_form,
};

struct QuadratureSpec {
  int n_angular = 512;  // 2D circle nodes
  int n_lat = 64;       // 3D Gauss-Legendre latitudes
  int n_lon = 128;      // 3D uniform longitudes
  QuadratureMode mode = QuadratureMode::analytic_phantom;

  void validate() const;
};

using PointFunction = std::function<double(const Point&)>;

/// Spherical means (kind = mean) or integrals (kind = integral) of f over spheres
/// of radius t_j = j * dt centred at every detector.
TatData spherical_forward(const PhantomSpec& f, const DetectorGeometry& geom, int n_samples, double dt, DataKind kind,
                          const QuadratureSpec& quad = {});
TatData spherical_forward(const ScalarField& f, const DetectorGeometry& geom, int n_samples, double dt, DataKind kind,
                          const QuadratureSpec& quad = {});
TatData spherical_forward(const PointFunction& f, const DetectorGeometry& geom, int n_samples, double dt,
                          DataKind kind, const QuadratureSpec& quad = {});

/// Mean of f over the circle/sphere of radius r around y, using quad's nodes.
double sphere_mean(const PointFunction& f, int dim, const Point& y, double r, const QuadratureSpec& quad);

/// Spherical integral of amp * indicator(ball(center, rho)) over the sphere |x - y| = r.
double analytic_ball_data(const Point& center, double rho, double amp, const Point& y, double r, int dim);
/// Closed-form spherical mean of a bump primitive over |x - y| = r.
double analytic_bump_mean(const Primitive& bump, const Point& y, double r);

/// mean <-> integral. The r = 0 mean is extrapolated quadratically from r > 0.
TatData convert_kind(const TatData& data, DataKind target);

/// p(y, t) = d/dt (t * mean(y, t)) in 3D, centred differences in t.
TatData pressure_from_means(const TatData& data);

/// Polynomial in up to three variables, keyed by exponent triples.
class Polynomial {
 public:
  using Exponent = std::array<int, 3>;
  explicit Polynomial(int dim = 2) : dim_(dim) {}
  int dim() const { return dim_; }
  int degree() const;
  double& operator[](const Exponent& e) { return coef_[e]; }
  double coefficient(const Exponent& e) const;
  const std::map<Exponent, double>& terms() const { return coef_; }
  double eval(const Point& x) const;
  Polynomial laplacian() const;
  Polynomial scaled(double s) const;
  /// max |coefficient difference| / max |coefficient of other|
  double relative_difference(const Polynomial& other) const;

 private:
  int dim_;
  std::map<Exponent, double> coef_;
};

inline constexpr int kMaxQk = 4;

/// Q_k(x) = integral |x - y|^{2k} f(y) dy, from trapezoid moments of f.
Polynomial qk_polynomial(const ScalarField& f, int k);
/// The constant c_k = 2k(2k + d - 2) in Laplacian(Q_k) = c_k Q_{k-1}.
double qk_laplacian_constant(int k, int dim);

}  // namespace tat
