// Series inversions: Norton's Fourier-Hankel method on a circle, the Dirichlet
// sine series on a square or cube, and the eigenfunction expansion for a
// variable sound speed.
#pragma once

#include <complex>
#include <string>
#include <vector>

#include "tat/tatdata.hpp"

namespace tat {

struct NortonOptions {
  /// divide by H_m(lambda R) = J_m + i Y_m; otherwise divide by J_m with small values masked
  bool use_hankel = true;
  /// highest angular order; negative selects n_detectors / 2 - 1
  int m_max = -1;
  /// 0 selects pi / dt and pi / (2 t_max)
  double lambda_max = 0.0;
  double dlambda = 0.0;
  /// frequencies with |J_m(lambda R)| below this fraction of max |J_m| are dropped
  double mask_threshold = 0.05;
  /// radial nodes for the angular coefficients; 0 selects 2 * n_samples
  int n_radial = 0;
};

/// Angular Fourier coefficients f_m(rho) of the reconstruction on rho_l = l * R / (n - 1).
struct NortonModes {
  double R = 1.0;
  Point center{0.0, 0.0, 0.0};
  int m_max = 0;
  std::vector<double> rho;
  std::vector<std::complex<double>> coef;  // coef[m * rho.size() + l], m = 0..m_max

  std::complex<double> at(int m, std::size_t l) const { return coef[m * rho.size() + l]; }
  /// f(x) = f_0 + 2 Re sum_{m>0} f_m(rho) e^{i m phi}, 0 outside the circle.
  double eval(const Point& x) const;
};

NortonModes norton2d_modes(const TatData& data, const NortonOptions& opt = {});
ScalarField norton2d(const TatData& data, const Grid& grid, const NortonOptions& opt = {},
                     std::vector<std::string>* warnings = nullptr);

struct SeriesOptions {
  /// sine modes per axis; 0 selects nodes_per_side - 2
  int m_max = 0;
  /// lambda mesh step; 0 selects pi / (2 t_max)
  double dlambda = 0.0;
  /// Lagrange interpolation points in lambda
  int interp_order = 8;
};

/// Coefficients alpha_m of f = sum alpha_m u_m in the orthonormal Dirichlet sine
/// basis u_m(x) = (2/L)^{d/2} prod sin(pi m_a (x_a - x0_a) / L), m_a = 1..m_max.
struct SeriesCoefficients {
  int dim = 2;
  int m_max = 0;
  double side = 2.0;
  Point origin{0.0, 0.0, 0.0};
  std::vector<double> alpha;  // row-major in (m_1 - 1, m_2 - 1[, m_3 - 1])

  double& at(int m1, int m2, int m3 = 1) { return alpha[flat(m1, m2, m3)]; }
  double at(int m1, int m2, int m3 = 1) const { return alpha[flat(m1, m2, m3)]; }
  std::size_t flat(int m1, int m2, int m3) const {
    std::size_t i = static_cast<std::size_t>(m1 - 1) * m_max + (m2 - 1);
    return dim == 2 ? i : i * m_max + (m3 - 1);
  }
};

/// u_m(x) for the box [origin, origin + side]^dim.
double box_eigenfunction(int dim, double side, const Point& origin, const std::array<int, 3>& m, const Point& x);

/// The (m_max + 2)^dim node grid on which the sine synthesis is exact.
Grid series_grid(const DetectorGeometry& geom, int m_max);

/// alpha_m from spherical integrals on a square (2D) or cube (3D) boundary.
SeriesCoefficients series_coefficients(const TatData& data, const SeriesOptions& opt = {});
/// sum alpha_m u_m on series_grid.
ScalarField series_synthesize(const SeriesCoefficients& c);

ScalarField cubic_series(const TatData& data, const SeriesOptions& opt = {});
ScalarField square_series_2d(const TatData& data, const SeriesOptions& opt = {});

/// Dirichlet eigenpairs of -c^2 Lap_h on the interior nodes of a square grid.
/// Eigenvectors are stored on the whole grid (zero on the boundary) and are
/// orthonormal in <u, v> = sum u v c^-2 h^2.
class EigenBasis {
 public:
  static EigenBasis discrete(const ScalarField& c, int k_max);

  const Grid& grid() const { return c_.grid(); }
  const ScalarField& speed() const { return c_; }
  int count() const { return static_cast<int>(lambda_.size()); }
  /// Wavenumber lambda_k; the eigenvalue is lambda_k^2.
  double lambda(int k) const { return lambda_[k]; }
  std::span<const double> vector(int k) const {
    return std::span<const double>(vectors_).subspan(static_cast<std::size_t>(k) * c_.size(), c_.size());
  }
  double inner(std::span<const double> u, std::span<const double> v) const;
  /// max |-c^2 Lap_h psi_k - lambda_k^2 psi_k| / lambda_k^2 over interior nodes
  double residual(int k) const;

 private:
  ScalarField c_;
  std::vector<double> lambda_;
  std::vector<double> vectors_;
};

inline constexpr int kMaxEigenGrid = 64;

enum class NormalDerivative {
  /// -psi at the inward neighbour, which makes the Green identity exact for the grid Laplacian
  discrete_green,
  /// second-order one-sided difference
  one_sided2,
};

/// f = sum f_k psi_k with f_k = -1/lambda_k int sin(lambda_k t) g_k(t) dt and
/// g_k(t) = int_S g dpsi_k/dnu, from pressure traces on the boundary of c's grid.
ScalarField eigen_expand_variable_speed(const TatData& data, const EigenBasis& basis, int k_max,
                                        NormalDerivative nd = NormalDerivative::discrete_green);
ScalarField eigen_expand_variable_speed(const TatData& data, const ScalarField& c, int k_max,
                                        NormalDerivative nd = NormalDerivative::discrete_green);

}  // namespace tat
