#include <lapacke.h>

#include <algorithm>
#include <cmath>

#include "dense.hpp"
#include "tat/series.hpp"

namespace tat {

namespace {

void check_square_grid(const Grid& g) {
  if (g.dim != 2) throw Error(ErrorCode::dimension_mismatch, "the discrete eigenbasis is two-dimensional");
  if (g.n[0] < 3 || g.n[1] < 3) throw Error(ErrorCode::invalid_argument, "eigenbasis grid needs at least 3x3 nodes");
  if (g.n[0] > kMaxEigenGrid || g.n[1] > kMaxEigenGrid)
    throw Error(ErrorCode::invalid_argument,
                "dense eigensolve is limited to " + std::to_string(kMaxEigenGrid) + "^2 grids");
}

// -Lap_h u on interior node (i, j), zero Dirichlet values
double neg_lap(std::span<const double> u, const Grid& g, int i, int j) {
  const double hx2 = g.spacing[0] * g.spacing[0], hy2 = g.spacing[1] * g.spacing[1];
  const double c = u[g.index(i, j)];
  return (2.0 * c - u[g.index(i - 1, j)] - u[g.index(i + 1, j)]) / hx2 +
         (2.0 * c - u[g.index(i, j - 1)] - u[g.index(i, j + 1)]) / hy2;
}

}  // namespace

EigenBasis EigenBasis::discrete(const ScalarField& c, int k_max) {
  const Grid& g = c.grid();
  g.validate();
  check_square_grid(g);
  if (c.min() <= 0.0) throw Error(ErrorCode::invalid_argument, "sound speed must be positive");
  const int nx = g.n[0] - 2, ny = g.n[1] - 2;
  const int N = nx * ny;
  if (k_max < 1 || k_max > N)
    throw Error(ErrorCode::invalid_argument, "k_max = " + std::to_string(k_max) + " but the grid has only " +
                                                 std::to_string(N) + " interior nodes");
  auto in = [&](int i, int j) { return (i - 1) * ny + (j - 1); };
  const double hx2 = g.spacing[0] * g.spacing[0], hy2 = g.spacing[1] * g.spacing[1];

  // M = -C L C, symmetric; C = diag(c)
  std::vector<double> A(static_cast<std::size_t>(N) * N, 0.0);
  for (int i = 1; i <= nx; ++i)
    for (int j = 1; j <= ny; ++j) {
      const int r = in(i, j);
      const double cr = c.at(i, j);
      A[static_cast<std::size_t>(r) * N + r] = cr * cr * (2.0 / hx2 + 2.0 / hy2);
      const int di[4] = {-1, 1, 0, 0}, dj[4] = {0, 0, -1, 1};
      for (int e = 0; e < 4; ++e) {
        int ii = i + di[e], jj = j + dj[e];
        if (ii < 1 || ii > nx || jj < 1 || jj > ny) continue;
        A[static_cast<std::size_t>(in(ii, jj)) * N + r] = -cr * c.at(ii, jj) / (e < 2 ? hx2 : hy2);
      }
    }

  std::vector<double> w(N), Z(static_cast<std::size_t>(N) * k_max);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(k_max));
  lapack_int found = 0;
  lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', N, A.data(), N, 0.0, 0.0, 1, k_max, 0.0, &found,
                                   w.data(), Z.data(), N, support.data());
  if (info != 0 || found != k_max)
    throw Error(ErrorCode::numeric_failure, "symmetric eigensolve failed (info " + std::to_string(info) + ")");

  EigenBasis b;
  b.c_ = c;
  b.lambda_.resize(k_max);
  b.vectors_.assign(static_cast<std::size_t>(k_max) * g.size(), 0.0);
  const double inv_h = 1.0 / std::sqrt(g.spacing[0] * g.spacing[1]);
  for (int k = 0; k < k_max; ++k) {
    if (w[k] <= 0.0) throw Error(ErrorCode::numeric_failure, "non-positive Dirichlet eigenvalue");
    b.lambda_[k] = std::sqrt(w[k]);
    const double* z = Z.data() + static_cast<std::size_t>(k) * N;
    // fix the sign so the largest component is positive
    int big = 0;
    for (int r = 1; r < N; ++r)
      if (std::abs(z[r]) > std::abs(z[big]) + 1e-12) big = r;
    const double sgn = z[big] < 0.0 ? -1.0 : 1.0;
    double* psi = b.vectors_.data() + static_cast<std::size_t>(k) * g.size();
    for (int i = 1; i <= nx; ++i)
      for (int j = 1; j <= ny; ++j) psi[g.index(i, j)] = sgn * c.at(i, j) * z[in(i, j)] * inv_h;
  }
  return b;
}

double EigenBasis::inner(std::span<const double> u, std::span<const double> v) const {
  const double dA = grid().spacing[0] * grid().spacing[1];
  double s = 0.0;
  for (std::size_t q = 0; q < u.size(); ++q) s += u[q] * v[q] / (c_[q] * c_[q]);
  return s * dA;
}

double EigenBasis::residual(int k) const {
  const Grid& g = grid();
  auto psi = vector(k);
  const double l2 = lambda_[k] * lambda_[k];
  std::vector<double> r(g.size(), 0.0);
  for (int i = 1; i + 1 < g.n[0]; ++i)
    for (int j = 1; j + 1 < g.n[1]; ++j) {
      std::size_t q = g.index(i, j);
      r[q] = c_[q] * c_[q] * neg_lap(psi, g, i, j) - l2 * psi[q];
    }
  return std::sqrt(inner(r, r)) / l2;
}

ScalarField eigen_expand_variable_speed(const TatData& data, const EigenBasis& basis, int k_max,
                                        NormalDerivative nd) {
  const auto& geom = data.geometry();
  if (geom.kind() != GeometryKind::square_boundary)
    throw Error(ErrorCode::unsupported_geometry, "the eigenfunction expansion needs square-boundary data");
  if (data.kind() != DataKind::pressure)
    throw Error(ErrorCode::unsupported_conversion, "the eigenfunction expansion needs pressure traces");
  const Grid& g = basis.grid();
  const Grid ng = geom.node_grid();
  bool same = ng.n == g.n;
  for (int a = 0; a < 2; ++a)
    same = same && std::abs(ng.origin[a] - g.origin[a]) <= 1e-9 * (1.0 + std::abs(g.origin[a])) &&
           std::abs(ng.spacing[a] - g.spacing[a]) <= 1e-9 * g.spacing[a];
  if (!same) throw Error(ErrorCode::dimension_mismatch, "sound-speed grid does not match the detector square");
  if (k_max < 1 || k_max > basis.count())
    throw Error(ErrorCode::invalid_argument, "k_max = " + std::to_string(k_max) + " exceeds the " +
                                                 std::to_string(basis.count()) + " available eigenpairs");

  // D(k, b): boundary quadrature of d psi_k / d nu at detector b
  const int nb = static_cast<int>(data.n_detectors());
  const int nx = g.n[0], ny = g.n[1];
  const std::vector<int> lut = geom.node_lookup();
  std::vector<double> D(static_cast<std::size_t>(k_max) * nb, 0.0);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const int b = lut[g.index(i, j)];
      if (b < 0) continue;
      const bool ex = i == 0 || i == nx - 1, ey = j == 0 || j == ny - 1;
      if (ex == ey) continue;  // corners
      int a = ex ? 0 : 1;
      int si = ex ? (i == 0 ? 1 : -1) : 0, sj = ey ? (j == 0 ? 1 : -1) : 0;
      const double h = g.spacing[a], ht = g.spacing[1 - a];
      for (int k = 0; k < k_max; ++k) {
        auto psi = basis.vector(k);
        double p1 = psi[g.index(i + si, j + sj)];
        double v;
        if (nd == NormalDerivative::discrete_green) {
          v = -p1 * ht / h;
        } else {
          double p2 = psi[g.index(i + 2 * si, j + 2 * sj)];
          v = ht * (-4.0 * p1 + p2) / (2.0 * h);
        }
        D[static_cast<std::size_t>(b) * k_max + k] = v;
      }
    }

  // g_k(t_j) = sum_b D(k, b) g(b, t_j)
  const int nt = data.n_samples();
  std::vector<double> gt(static_cast<std::size_t>(nb) * nt);
  for (int b = 0; b < nb; ++b)
    for (int j = 0; j < nt; ++j) gt[static_cast<std::size_t>(j) * nb + b] = data.at(b, j);
  std::vector<double> gk(static_cast<std::size_t>(k_max) * nt);
  matmul(k_max, nt, nb, D.data(), gt.data(), gk.data());

  std::vector<double> fk(k_max);
  const double dt = data.dt();
#pragma omp parallel for schedule(static)
  for (int k = 0; k < k_max; ++k) {
    const double lam = basis.lambda(k);
    double s = 0.0;
    for (int j = 1; j < nt; ++j)
      s += (j == nt - 1 ? 0.5 : 1.0) * std::sin(lam * j * dt) * gk[static_cast<std::size_t>(j) * k_max + k];
    fk[k] = -s * dt / lam;
  }

  std::vector<double> f(g.size(), 0.0);
  for (int k = 0; k < k_max; ++k) {
    auto psi = basis.vector(k);
    for (std::size_t q = 0; q < f.size(); ++q) f[q] += fk[k] * psi[q];
  }
  for (double x : f)
    if (!std::isfinite(x)) throw Error(ErrorCode::numeric_failure, "non-finite value in reconstruction");
  return ScalarField(g, std::move(f));
}

ScalarField eigen_expand_variable_speed(const TatData& data, const ScalarField& c, int k_max, NormalDerivative nd) {
  return eigen_expand_variable_speed(data, EigenBasis::discrete(c, k_max), k_max, nd);
}

}  // namespace tat
