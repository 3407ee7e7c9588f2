#include "tat/fbp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tat/bessel.hpp"
#include "tat/forward.hpp"

namespace tat {

using std::numbers::pi;

namespace {

struct VariantInfo {
  FbpVariant v;
  const char* name;
  int dim;
};

constexpr VariantInfo kVariants[] = {
    {FbpVariant::fpr3d_laplacian, "fpr3d_laplacian", 3},
    {FbpVariant::fpr3d_d2t, "fpr3d_d2t", 3},
    {FbpVariant::fpr3d_ddt_chain, "fpr3d_ddt_chain", 3},
    {FbpVariant::finch2d_laplacian, "finch2d_laplacian", 2},
    {FbpVariant::finch2d_filtered, "finch2d_filtered", 2},
    {FbpVariant::kunyansky_general, "kunyansky_general", 0},
    {FbpVariant::kunyansky_2d, "kunyansky_2d", 2},
    {FbpVariant::kunyansky_3d, "kunyansky_3d", 3},
};

}  // namespace

const char* to_string(FbpVariant v) {
  for (const auto& i : kVariants)
    if (i.v == v) return i.name;
  return "?";
}

FbpVariant parse_fbp_variant(const std::string& name) {
  for (const auto& i : kVariants)
    if (name == i.name) return i.v;
  throw Error(ErrorCode::invalid_argument, "unknown reconstruction method '" + name + "'");
}

int variant_dim(FbpVariant v) {
  for (const auto& i : kVariants)
    if (i.v == v) return i.dim;
  return 0;
}

double FilterProfile::at(std::size_t detector, double s) const {
  const double* row = values.data() + detector * n;
  double u = (s - s0) / ds;
  if (u <= 0.0) return row[0];
  if (u >= n - 1) return row[n - 1];
  int k = static_cast<int>(u);
  double w = u - k;
  return (1.0 - w) * row[k] + w * row[k + 1];
}

namespace {

// first and second derivatives on a uniform grid, second-order one-sided at the ends
void deriv1(const std::vector<double>& v, double h, std::vector<double>& out) {
  const int n = static_cast<int>(v.size());
  out.resize(n);
  for (int j = 1; j + 1 < n; ++j) out[j] = (v[j + 1] - v[j - 1]) / (2.0 * h);
  out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  out[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
}

void deriv2(const std::vector<double>& v, double h, std::vector<double>& out) {
  const int n = static_cast<int>(v.size());
  out.resize(n);
  for (int j = 1; j + 1 < n; ++j) out[j] = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (h * h);
  out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h);
  out[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / (h * h);
}

double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(std::abs(x)); }

/// Weights W[k][j] with sum_j W[k][j] g_j = integral_0^{t_max} g(t) K(s_k, t) dt
/// exactly for the piecewise-linear interpolant of g.
template <typename Prim>
std::vector<double> product_weights(const std::vector<double>& s, int nt, double dt, const Prim& prim) {
  std::vector<double> w(s.size() * nt, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < s.size(); ++k) {
    double* row = w.data() + k * nt;
    auto [p0a, p1a] = prim(s[k], 0.0);
    for (int j = 0; j + 1 < nt; ++j) {
      double a = j * dt, b = (j + 1) * dt;
      auto [p0b, p1b] = prim(s[k], b);
      double i0 = p0b - p0a, i1 = p1b - p1a;
      row[j] += (b * i0 - i1) / dt;
      row[j + 1] += (i1 - a * i0) / dt;
      p0a = p0b;
      p1a = p1b;
    }
  }
  return w;
}

/// antiderivatives of 1/(s^2 - t^2) and t/(s^2 - t^2) in t (principal value across t = s)
std::pair<double, double> pv_prim(double s, double t) {
  return {std::log(std::abs((s + t) / (s - t))) / (2.0 * s), -0.5 * std::log(std::abs(s * s - t * t))};
}

/// antiderivatives of log|t^2 - s^2| and t log|t^2 - s^2| in t
std::pair<double, double> log_prim(double s, double t) {
  double w = t * t - s * s;
  return {xlogx(t - s) + xlogx(t + s) - 2.0 * t, 0.5 * (xlogx(w) - w)};
}

struct Setup {
  int dim;
  double R;
  Point center;
  TatData g;  // spherical integrals
};

Setup prepare(FbpVariant v, const TatData& data) {
  const auto& geom = data.geometry();
  if (geom.kind() == GeometryKind::arc)
    throw Error(ErrorCode::unsupported_geometry, "backprojection formulas need a closed circle or sphere, not an arc");
  if (!geom.is_closed_sphere())
    throw Error(ErrorCode::unsupported_geometry,
                std::string("backprojection formulas need a circle or sphere, got ") + to_string(geom.kind()));
  int vd = variant_dim(v);
  if (vd != 0 && vd != data.dim())
    throw Error(ErrorCode::dimension_mismatch, std::string(to_string(v)) + " is a " + std::to_string(vd) +
                                                   "D formula but the data are " + std::to_string(data.dim()) + "D");
  if (data.kind() == DataKind::pressure)
    throw Error(ErrorCode::unsupported_conversion, "backprojection needs spherical means or integrals, not pressure");
  if (data.n_samples() < 8) throw Error(ErrorCode::invalid_argument, "too few radial samples");
  if (data.t_max() < 2.0 * geom.size() * (1.0 - 1e-9))
    throw Error(ErrorCode::invalid_argument, "radial extent of the data must reach the detector diameter 2R");
  TatData g = data.kind() == DataKind::integral ? data : convert_kind(data, DataKind::integral);
  return {data.dim(), geom.size(), geom.center(), std::move(g)};
}

std::vector<double> half_node_grid(int n, double dt) {
  std::vector<double> s(n);
  for (int k = 0; k < n; ++k) s[k] = (k + 0.5) * dt;
  return s;
}

FilterProfile apply_matrix(const TatData& g, const std::vector<double>& w, const std::vector<double>& s, double scale) {
  const int nt = g.n_samples();
  const std::size_t ns = s.size(), nd = g.n_detectors();
  FilterProfile p;
  p.s0 = s[0];
  p.ds = s[1] - s[0];
  p.n = static_cast<int>(ns);
  p.values.assign(nd * ns, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < nd; ++i) {
    auto row = g.row(i);
    for (std::size_t k = 0; k < ns; ++k) {
      const double* wk = w.data() + k * nt;
      double acc = 0.0;
      for (int j = 0; j < nt; ++j) acc += wk[j] * row[j];
      p.values[i * ns + k] = scale * acc;
    }
  }
  return p;
}

template <typename Fn>
FilterProfile pointwise(const TatData& g, const Fn& per_row) {
  const int nt = g.n_samples();
  FilterProfile p;
  p.s0 = 0.0;
  p.ds = g.dt();
  p.n = nt;
  p.values.resize(g.n_detectors() * nt);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < g.n_detectors(); ++i) {
    auto row = g.row(i);
    std::vector<double> in(row.begin(), row.end()), out;
    per_row(in, out);
    std::copy(out.begin(), out.end(), p.values.begin() + i * nt);
  }
  return p;
}

FilterProfile kunyansky_general_profile(const Setup& su, const FbpOptions& opt) {
  const TatData& g = su.g;
  const int nt = g.n_samples();
  const double dt = g.dt();
  const double lmax = opt.lambda_max > 0.0 ? opt.lambda_max : pi / dt;
  const double dl = opt.dlambda > 0.0 ? opt.dlambda : pi / (2.0 * g.t_max());
  const int nl = static_cast<int>(std::floor(lmax / dl + 1e-9));
  if (nl < 2) throw Error(ErrorCode::invalid_argument, "lambda grid has fewer than two nodes");
  const int n = su.dim;
  const int pw = 2 * n - 3;
  auto s = half_node_grid(nt, dt);
  // trapezoid weights in lambda (lambda = 0 dropped) and t
  std::vector<double> wl(nl), wt(nt, dt);
  for (int k = 0; k < nl; ++k) {
    double lam = (k + 1) * dl;
    wl[k] = std::pow(lam, pw) * dl * (k == nl - 1 ? 0.5 : 1.0);
  }
  // In 2D the lambda integrand grows linearly from 0; the Euler-Maclaurin end
  // correction -dl^2/12 F'(0), with F'(0) ~ F(dl)/dl, removes the leading error.
  if (n == 2) wl[0] *= 13.0 / 12.0;
  wt[0] = 0.5 * dt;
  wt[nt - 1] = 0.5 * dt;
  std::vector<double> tj(static_cast<std::size_t>(nl) * nt), ty(tj.size()), sj(tj.size()), sy(tj.size());
#pragma omp parallel for schedule(static)
  for (int k = 0; k < nl; ++k) {
    double lam = (k + 1) * dl;
    for (int j = 0; j < nt; ++j) {
      std::size_t q = static_cast<std::size_t>(k) * nt + j;
      double t = j * dt;
      tj[q] = radial_kernel_j(n, lam * t) * wt[j];
      // the integral data vanish at t = 0, which tames the Y singularity there
      ty[q] = j == 0 ? 0.0 : radial_kernel_y(n, lam * t) * wt[j];
      sj[q] = radial_kernel_j(n, lam * s[j]) * wl[k];
      sy[q] = radial_kernel_y(n, lam * s[j]) * wl[k];
    }
  }
  FilterProfile p;
  p.s0 = s[0];
  p.ds = dt;
  p.n = nt;
  p.values.assign(g.n_detectors() * nt, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < g.n_detectors(); ++i) {
    auto row = g.row(i);
    std::vector<double> jh(nl), yh(nl);
    for (int k = 0; k < nl; ++k) {
      const double* a = tj.data() + static_cast<std::size_t>(k) * nt;
      const double* b = ty.data() + static_cast<std::size_t>(k) * nt;
      double ja = 0.0, ya = 0.0;
      for (int j = 0; j < nt; ++j) {
        ja += a[j] * row[j];
        ya += b[j] * row[j];
      }
      jh[k] = ja;
      yh[k] = ya;
    }
    double* out = p.values.data() + i * nt;
    for (int k = 0; k < nl; ++k) {
      const double* a = sj.data() + static_cast<std::size_t>(k) * nt;
      const double* b = sy.data() + static_cast<std::size_t>(k) * nt;
      for (int m = 0; m < nt; ++m) out[m] += b[m] * jh[k] - a[m] * yh[k];
    }
  }
  return p;
}

/// t * (spherical mean) from spherical integrals
std::vector<double> t_times_mean(const std::vector<double>& g, double dt, int dim) {
  std::vector<double> out(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    double t = j * dt;
    out[j] = j == 0 ? 0.0 : (dim == 3 ? g[j] / (4.0 * pi * t) : g[j] / (2.0 * pi));
  }
  return out;
}

FilterProfile profile_for(FbpVariant v, const Setup& su, const FbpOptions& opt) {
  const TatData& g = su.g;
  const double dt = g.dt();
  const int nt = g.n_samples();
  const int dim = su.dim;
  switch (v) {
    case FbpVariant::fpr3d_laplacian:
      return pointwise(g, [&](const std::vector<double>& in, std::vector<double>& out) {
        out = t_times_mean(in, dt, dim);
      });
    case FbpVariant::fpr3d_d2t:
      return pointwise(g, [&](const std::vector<double>& in, std::vector<double>& out) {
        deriv2(t_times_mean(in, dt, dim), dt, out);
      });
    case FbpVariant::fpr3d_ddt_chain:
      // t d/dt ((1/t) d/dt (g/t))
      return pointwise(g, [&](const std::vector<double>& in, std::vector<double>& out) {
        std::vector<double> q(nt), d;
        for (int j = 1; j < nt; ++j) q[j] = in[j] / (j * dt);
        q[0] = 0.0;
        deriv1(q, dt, d);
        for (int j = 1; j < nt; ++j) d[j] /= j * dt;
        d[0] = 3.0 * d[1] - 3.0 * d[2] + d[3];
        deriv1(d, dt, out);
        for (int j = 0; j < nt; ++j) out[j] *= j * dt;
      });
    case FbpVariant::kunyansky_3d:
      return pointwise(g, [&](const std::vector<double>& in, std::vector<double>& out) {
        std::vector<double> q(nt), d;
        for (int j = 1; j < nt; ++j) q[j] = in[j] / (j * dt);
        q[0] = 2.0 * q[1] - q[2];
        deriv1(q, dt, d);
        out.resize(nt);
        for (int j = 1; j < nt; ++j) out[j] = d[j] / (j * dt);
        out[0] = 2.0 * out[1] - out[2];
      });
    case FbpVariant::finch2d_laplacian: {
      std::vector<double> s(nt);
      for (int k = 0; k < nt; ++k) s[k] = k * dt;
      return apply_matrix(g, product_weights(s, nt, dt, log_prim), s, 1.0);
    }
    case FbpVariant::finch2d_filtered: {
      // q = d/dt (t d/dt (g / t)), then the log-kernel integral
      TatData filtered = g;
      std::vector<double> vals(g.values().begin(), g.values().end());
      for (std::size_t i = 0; i < g.n_detectors(); ++i) {
        std::vector<double> q(nt), d, e;
        auto row = g.row(i);
        for (int j = 1; j < nt; ++j) q[j] = row[j] / (j * dt);
        q[0] = 3.0 * q[1] - 3.0 * q[2] + q[3];
        deriv1(q, dt, d);
        for (int j = 0; j < nt; ++j) d[j] *= j * dt;
        deriv1(d, dt, e);
        std::copy(e.begin(), e.end(), vals.begin() + i * nt);
      }
      TatData qd(g.geometry(), DataKind::mean, nt, dt, std::move(vals));
      std::vector<double> s(nt);
      for (int k = 0; k < nt; ++k) s[k] = k * dt;
      return apply_matrix(qd, product_weights(s, nt, dt, log_prim), s, 1.0);
    }
    case FbpVariant::kunyansky_2d: {
      auto s = half_node_grid(nt, dt);
      return apply_matrix(g, product_weights(s, nt, dt, pv_prim), s, 1.0);
    }
    case FbpVariant::kunyansky_general:
      return kunyansky_general_profile(su, opt);
  }
  throw Error(ErrorCode::invalid_argument, "unknown variant");
}

enum class PostOp { none, laplacian, divergence };

PostOp post_op(FbpVariant v) {
  switch (v) {
    case FbpVariant::fpr3d_laplacian:
    case FbpVariant::finch2d_laplacian:
      return PostOp::laplacian;
    case FbpVariant::kunyansky_general:
    case FbpVariant::kunyansky_2d:
    case FbpVariant::kunyansky_3d:
      return PostOp::divergence;
    default:
      return PostOp::none;
  }
}

double constant_for(FbpVariant v, int dim, double R) {
  switch (v) {
    // profiles of the first two are built from t * mean = g / (4 pi t)
    case FbpVariant::fpr3d_laplacian:
    case FbpVariant::fpr3d_d2t:
      return -1.0 / (2.0 * pi * R);
    case FbpVariant::fpr3d_ddt_chain:
      return -1.0 / (8.0 * pi * pi * R);
    case FbpVariant::finch2d_laplacian:
    case FbpVariant::finch2d_filtered:
      return 1.0 / (4.0 * pi * pi * R);
    case FbpVariant::kunyansky_general:
      return -1.0 / (4.0 * std::pow(2.0 * pi, dim - 1));
    case FbpVariant::kunyansky_2d:
      return -1.0 / (2.0 * pi * pi);
    case FbpVariant::kunyansky_3d:
      return 1.0 / (8.0 * pi * pi);
  }
  return 1.0;
}

/// centred difference along `axis` at node q, second-order one-sided at the edges
double axis_diff(const std::vector<double>& v, const Grid& g, std::size_t q, int axis, std::size_t stride) {
  auto ijk = g.unflatten(q);
  const int i = ijk[axis], n = g.n[axis];
  const double h = g.spacing[axis];
  if (i > 0 && i < n - 1) return (v[q + stride] - v[q - stride]) / (2.0 * h);
  if (i == 0) return (-3.0 * v[q] + 4.0 * v[q + stride] - v[q + 2 * stride]) / (2.0 * h);
  return (3.0 * v[q] - 4.0 * v[q - stride] + v[q - 2 * stride]) / (2.0 * h);
}

double axis_diff2(const std::vector<double>& v, const Grid& g, std::size_t q, int axis, std::size_t stride) {
  auto ijk = g.unflatten(q);
  const int i = ijk[axis], n = g.n[axis];
  const double h2 = g.spacing[axis] * g.spacing[axis];
  if (i > 0 && i < n - 1) return (v[q + stride] - 2.0 * v[q] + v[q - stride]) / h2;
  if (i == 0) return (2.0 * v[q] - 5.0 * v[q + stride] + 4.0 * v[q + 2 * stride] - v[q + 3 * stride]) / h2;
  return (2.0 * v[q] - 5.0 * v[q - stride] + 4.0 * v[q - 2 * stride] - v[q - 3 * stride]) / h2;
}

}  // namespace

FilterProfile fbp_filter_profile(FbpVariant v, const TatData& data, const FbpOptions& opt) {
  Setup su = prepare(v, data);
  return profile_for(v, su, opt);
}

ScalarField fbp_invert(const TatData& data, const Grid& grid, FbpVariant v, const FbpOptions& opt,
                       std::vector<std::string>* warnings) {
  grid.validate();
  Setup su = prepare(v, data);
  if (grid.dim != su.dim) throw Error(ErrorCode::dimension_mismatch, "grid and data dimensions differ");
  for (int a = 0; a < grid.dim; ++a)
    if (grid.n[a] < 4) throw Error(ErrorCode::invalid_argument, "reconstruction grid needs at least 4 nodes per axis");
  if (warnings && data.kind() == DataKind::mean)
    warnings->push_back("mean data converted to spherical integrals before filtering");
  FilterProfile prof = profile_for(v, su, opt);

  const auto& geom = su.g.geometry();
  const auto& pos = geom.positions();
  const auto& nrm = geom.normals();
  const auto& wts = geom.weights();
  const std::size_t nd = geom.count();
  const std::size_t nn = grid.size();
  const int dim = su.dim;
  const PostOp op = post_op(v);
  const int ncomp = op == PostOp::divergence ? dim : 1;

  std::vector<std::vector<double>> bp(ncomp, std::vector<double>(nn, 0.0));
#pragma omp parallel for schedule(static)
  for (std::size_t q = 0; q < nn; ++q) {
    Point x = grid.node(q);
    double acc[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < nd; ++i) {
      double h = wts[i] * prof.at(i, distance(x, pos[i], dim));
      if (ncomp == 1) {
        acc[0] += h;
      } else {
        for (int a = 0; a < dim; ++a) acc[a] += h * nrm[i][a];
      }
    }
    for (int c = 0; c < ncomp; ++c) bp[c][q] = acc[c];
  }

  std::array<std::size_t, 3> stride{};
  stride[dim - 1] = 1;
  for (int a = dim - 2; a >= 0; --a) stride[a] = stride[a + 1] * grid.n[a + 1];
  const double C = constant_for(v, dim, su.R);
  std::vector<double> out(nn);
  int outside = 0;
#pragma omp parallel for schedule(static) reduction(+ : outside)
  for (std::size_t q = 0; q < nn; ++q) {
    double val = 0.0;
    switch (op) {
      case PostOp::none:
        val = bp[0][q];
        break;
      case PostOp::laplacian:
        for (int a = 0; a < dim; ++a) val += axis_diff2(bp[0], grid, q, a, stride[a]);
        break;
      case PostOp::divergence:
        for (int a = 0; a < dim; ++a) val += axis_diff(bp[a], grid, q, a, stride[a]);
        break;
    }
    if (distance(grid.node(q), su.center, dim) >= su.R) {
      val = 0.0;
      ++outside;
    }
    out[q] = C * val;
  }
  if (warnings && outside > 0)
    warnings->push_back(std::to_string(outside) + " grid nodes lie outside the detector " +
                        (dim == 2 ? "circle" : "sphere") + " and were set to 0");
  for (double x : out)
    if (!std::isfinite(x)) throw Error(ErrorCode::numeric_failure, "non-finite value in reconstruction");
  return ScalarField(grid, std::move(out));
}

}  // namespace tat
