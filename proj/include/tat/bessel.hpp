// Cylindrical Bessel functions, their zeros, and the radial kernels used by the
// filtration formulas.
#pragma once

#include <vector>

namespace tat {

/// J_nu(t). Integer orders accept negative t.
double bessel_j(double order, double t);
/// Y_nu(t); throws a domain error for t <= 0.
double bessel_y(double order, double t);

/// J_0(t) ... J_{m_max}(t) into out (resized to m_max + 1).
void bessel_j_orders(int m_max, double t, std::vector<double>& out);
/// Y_0(t) ... Y_{m_max}(t) by forward recurrence; t > 0.
void bessel_y_orders(int m_max, double t, std::vector<double>& out);

/// First `count` positive zeros of J_m, bracketed from McMahon's expansion and bisected.
std::vector<double> bessel_zeros(int m, int count);
/// McMahon's large-zero expansion of the q-th zero of J_m.
double mcmahon_zero(int m, int q);

/// Tabulated zeros j_{m,q} for m = 0..m_max, q = 1..q_max.
struct BesselTable {
  int m_max = 0;
  int q_max = 0;
  std::vector<std::vector<double>> zeros;  // zeros[m][q-1]

  static BesselTable build(int m_max, int q_max);
  double zero(int m, int q) const { return zeros[m][q - 1]; }
};

/// Radial kernels J(t) = J_{n/2-1}(t) / t^{n/2-1} and Y(t) = Y_{n/2-1}(t) / t^{n/2-1}
/// for spatial dimension n in {2, 3}. J(0) is the series limit 1 / (2^{n/2-1} Gamma(n/2)).
double radial_kernel_j(int n, double t);
double radial_kernel_y(int n, double t);

}  // namespace tat
