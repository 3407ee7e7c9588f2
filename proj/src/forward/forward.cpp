#include "tat/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tat {

using std::numbers::pi;

void QuadratureSpec::validate() const {
  if (n_angular < 8 || n_lat < 8 || n_lon < 8)
    throw Error(ErrorCode::invalid_argument, "quadrature point counts must be >= 8");
}

namespace {

/// Unit-sphere quadrature nodes. In 2D the nodes come in mirror pairs about the
/// x axis, which are summed pairwise so odd integrands cancel exactly.
struct SphereNodes {
  int dim;
  // 2D
  std::vector<double> c, s;
  // 3D
  std::vector<double> z, zs, wz, cphi, sphi;

  SphereNodes(int d, const QuadratureSpec& q) : dim(d) {
    q.validate();
    if (d == 2) {
      const int n = q.n_angular;
      c.resize(n);
      s.resize(n);
      for (int k = 0; k <= n / 2; ++k) {
        double th = 2.0 * pi * k / n;
        c[k] = std::cos(th);
        s[k] = std::sin(th);
        if (k > 0 && k < n - k) {
          c[n - k] = c[k];
          s[n - k] = -s[k];
        }
      }
      if (n % 2 == 0) s[n / 2] = 0.0;
      s[0] = 0.0;
    } else {
      gauss_legendre(q.n_lat, z, wz);
      for (double zz : z) zs.push_back(std::sqrt(std::max(0.0, 1.0 - zz * zz)));
      for (int k = 0; k < q.n_lon; ++k) {
        cphi.push_back(std::cos(2.0 * pi * k / q.n_lon));
        sphi.push_back(std::sin(2.0 * pi * k / q.n_lon));
      }
    }
  }

  /// phi0 rotates the 2D node set; mirror pairs are symmetric about the line
  /// through y at angle phi0.
  template <typename F>
  double mean(const F& f, const Point& y, double r, double phi0 = 0.0) const {
    if (r == 0.0) return f(y);
    if (dim == 2) {
      const int n = static_cast<int>(c.size());
      const double c0 = phi0 == 0.0 ? 1.0 : std::cos(phi0), s0 = phi0 == 0.0 ? 0.0 : std::sin(phi0);
      double acc = f(Point{y[0] + r * c0, y[1] + r * s0, 0.0});
      if (n % 2 == 0) acc += f(Point{y[0] - r * c0, y[1] - r * s0, 0.0});
      for (int k = 1; k < n - k; ++k) {
        double ax = r * c0 * c[k], ay = r * s0 * c[k], bx = r * s0 * s[k], by = r * c0 * s[k];
        acc += f(Point{y[0] + ax - bx, y[1] + ay + by, 0.0}) + f(Point{y[0] + ax + bx, y[1] + ay - by, 0.0});
      }
      return acc / n;
    }
    double acc = 0.0;
    const std::size_t nl = cphi.size();
    for (std::size_t j = 0; j < z.size(); ++j) {
      double ring = 0.0;
      for (std::size_t k = 0; k < nl; ++k)
        ring += f(Point{y[0] + r * zs[j] * cphi[k], y[1] + r * zs[j] * sphi[k], y[2] + r * z[j]});
      acc += 0.5 * wz[j] * ring / nl;
    }
    return acc;
  }
};

double sphere_measure(int dim, double r) { return dim == 2 ? 2.0 * pi * r : 4.0 * pi * r * r; }

template <typename MeanFn>
TatData forward_impl(const DetectorGeometry& geom, int n_samples, double dt, DataKind kind, const MeanFn& mean_at) {
  if (kind == DataKind::pressure)
    throw Error(ErrorCode::invalid_argument, "spherical_forward produces mean or integral data only");
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "sample spacing must be positive");
  if (n_samples < 1) throw Error(ErrorCode::invalid_argument, "need at least one sample");
  const std::size_t nd = geom.count();
  const int dim = geom.dim();
  std::vector<double> v(nd * n_samples);
  const double phi0 = geom.kind() == GeometryKind::line_segment ? geom.angle0() : 0.0;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < nd; ++i) {
    const Point& y = geom.positions()[i];
    for (int j = 0; j < n_samples; ++j) {
      double r = j * dt;
      double m = mean_at(y, r, phi0);
      v[i * n_samples + j] = kind == DataKind::mean ? m : (j == 0 ? 0.0 : m * sphere_measure(dim, r));
    }
  }
  return TatData(geom, kind, n_samples, dt, std::move(v));
}

}  // namespace

double sphere_mean(const PointFunction& f, int dim, const Point& y, double r, const QuadratureSpec& quad) {
  SphereNodes nodes(dim, quad);
  return nodes.mean(f, y, r);
}

TatData spherical_forward(const PointFunction& f, const DetectorGeometry& geom, int n_samples, double dt,
                          DataKind kind, const QuadratureSpec& quad) {
  SphereNodes nodes(geom.dim(), quad);
  return forward_impl(geom, n_samples, dt, kind, [&](const Point& y, double r, double a) { return nodes.mean(f, y, r, a); });
}

TatData spherical_forward(const ScalarField& f, const DetectorGeometry& geom, int n_samples, double dt,
                          DataKind kind, const QuadratureSpec& quad) {
  if (f.grid().dim != geom.dim()) throw Error(ErrorCode::dimension_mismatch, "field and geometry dimensions differ");
  SphereNodes nodes(geom.dim(), quad);
  auto fn = [&](const Point& x) { return f.interpolate(x); };
  return forward_impl(geom, n_samples, dt, kind, [&](const Point& y, double r, double a) { return nodes.mean(fn, y, r, a); });
}

TatData spherical_forward(const PhantomSpec& f, const DetectorGeometry& geom, int n_samples, double dt,
                          DataKind kind, const QuadratureSpec& quad) {
  if (f.dim() != 0 && f.dim() != geom.dim())
    throw Error(ErrorCode::dimension_mismatch, "phantom and geometry dimensions differ");
  for (const auto& p : f.primitives) p.validate();
  if (quad.mode == QuadratureMode::grid_interpolated)
    throw Error(ErrorCode::invalid_argument, "grid-interpolated mode needs a ScalarField");
  SphereNodes nodes(geom.dim(), quad);
  const int dim = geom.dim();
  if (quad.mode == QuadratureMode::analytic_phantom) {
    auto fn = [&](const Point& x) { return eval_phantom(f, x); };
    return forward_impl(geom, n_samples, dt, kind, [&](const Point& y, double r, double a) { return nodes.mean(fn, y, r, a); });
  }
  PhantomSpec rest;
  std::vector<Primitive> exact;
  for (const auto& p : f.primitives) {
    if (p.shape == Shape::rect || p.shape == Shape::box)
      rest.add(p);
    else
      exact.push_back(p);
  }
  auto fn_rest = [&](const Point& x) { return eval_phantom(rest, x); };
  return forward_impl(geom, n_samples, dt, kind, [&](const Point& y, double r, double a) {
    double m = rest.primitives.empty() ? 0.0 : nodes.mean(fn_rest, y, r, a);
    for (const auto& p : exact) {
      if (p.shape == Shape::bump) {
        m += analytic_bump_mean(p, y, r);
      } else if (r == 0.0) {
        m += p.eval(y);
      } else {
        m += analytic_ball_data(p.center, p.size[0], p.amp, y, r, dim) / sphere_measure(dim, r);
      }
    }
    return m;
  });
}

double analytic_ball_data(const Point& center, double rho, double amp, const Point& y, double r, int dim) {
  if (r <= 0.0) return 0.0;
  const double d = distance(center, y, dim);
  const double full = sphere_measure(dim, r);
  if (r <= rho - d) return amp * full;
  if (r >= rho + d || r <= d - rho) return 0.0;
  double ca = std::clamp((d * d + r * r - rho * rho) / (2.0 * d * r), -1.0, 1.0);
  if (dim == 2) return amp * 2.0 * r * std::acos(ca);
  return amp * 2.0 * pi * r * r * (1.0 - ca);
}

double analytic_bump_mean(const Primitive& bump, const Point& y, double r) {
  const double rho = bump.size[0];
  const double d = distance(bump.center, y, bump.dim);
  auto phi = [&](double s) {
    double q = 1.0 - s * s / (rho * rho);
    return q > 0.0 ? bump.amp * q * q * q : 0.0;
  };
  if (r == 0.0) return phi(d);
  if (bump.dim == 3) {
    if (d < 1e-7 * rho) return phi(r);
    double lo = std::abs(d - r), hi = std::min(d + r, rho);
    if (lo >= rho) return 0.0;
    auto q4 = [&](double s) {
      double q = 1.0 - s * s / (rho * rho);
      return q * q * q * q;
    };
    return bump.amp * rho * rho / (16.0 * d * r) * (q4(lo) - q4(hi));
  }
  const double A = (rho * rho - d * d - r * r) / (rho * rho);
  const double B = 2.0 * d * r / (rho * rho);
  if (B == 0.0) return A > 0.0 ? bump.amp * A * A * A : 0.0;
  const double alpha = std::acos(std::clamp(-A / B, -1.0, 1.0));
  if (alpha == 0.0) return 0.0;
  const double sa = std::sin(alpha);
  const double i0 = alpha, i1 = sa, i2 = 0.5 * alpha + 0.25 * std::sin(2.0 * alpha), i3 = sa - sa * sa * sa / 3.0;
  return bump.amp / pi * (A * A * A * i0 + 3.0 * A * A * B * i1 + 3.0 * A * B * B * i2 + B * B * B * i3);
}

TatData convert_kind(const TatData& data, DataKind target) {
  if (data.kind() == DataKind::pressure || target == DataKind::pressure)
    throw Error(ErrorCode::unsupported_conversion, "pressure data cannot be converted to or from sphere integrals");
  if (data.kind() == target) return data;
  const int ns = data.n_samples();
  const int dim = data.dim();
  std::vector<double> v(data.values().begin(), data.values().end());
  for (std::size_t i = 0; i < data.n_detectors(); ++i) {
    double* row = v.data() + i * ns;
    if (target == DataKind::integral) {
      row[0] = 0.0;
      for (int j = 1; j < ns; ++j) row[j] *= sphere_measure(dim, data.t(j));
    } else {
      for (int j = 1; j < ns; ++j) row[j] /= sphere_measure(dim, data.t(j));
      if (ns >= 4)
        row[0] = 3.0 * row[1] - 3.0 * row[2] + row[3];
      else if (ns >= 3)
        row[0] = 2.0 * row[1] - row[2];
      else if (ns == 2)
        row[0] = row[1];
    }
  }
  return TatData(data.geometry(), target, ns, data.dt(), std::move(v));
}

TatData pressure_from_means(const TatData& data) {
  if (data.dim() != 3) throw Error(ErrorCode::dimension_mismatch, "the Poisson-Kirchhoff relation is three-dimensional");
  if (data.kind() != DataKind::mean) throw Error(ErrorCode::invalid_argument, "pressure_from_means needs mean data");
  const int ns = data.n_samples();
  if (ns < 3) throw Error(ErrorCode::invalid_argument, "need at least three samples");
  const double dt = data.dt();
  std::vector<double> v(data.values().size());
  std::vector<double> g(ns);
  for (std::size_t i = 0; i < data.n_detectors(); ++i) {
    auto row = data.row(i);
    for (int j = 0; j < ns; ++j) g[j] = data.t(j) * row[j];
    double* p = v.data() + i * ns;
    p[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * dt);
    for (int j = 1; j + 1 < ns; ++j) p[j] = (g[j + 1] - g[j - 1]) / (2.0 * dt);
    p[ns - 1] = (3.0 * g[ns - 1] - 4.0 * g[ns - 2] + g[ns - 3]) / (2.0 * dt);
  }
  return TatData(data.geometry(), DataKind::pressure, ns, dt, std::move(v));
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [e, c] : coef_)
    if (c != 0.0) d = std::max(d, e[0] + e[1] + e[2]);
  return d;
}

double Polynomial::coefficient(const Exponent& e) const {
  auto it = coef_.find(e);
  return it == coef_.end() ? 0.0 : it->second;
}

double Polynomial::eval(const Point& x) const {
  double s = 0.0;
  for (const auto& [e, c] : coef_) s += c * std::pow(x[0], e[0]) * std::pow(x[1], e[1]) * std::pow(x[2], e[2]);
  return s;
}

Polynomial Polynomial::laplacian() const {
  Polynomial out(dim_);
  for (const auto& [e, c] : coef_)
    for (int a = 0; a < dim_; ++a)
      if (e[a] >= 2) {
        Exponent f = e;
        f[a] -= 2;
        out[f] += c * e[a] * (e[a] - 1);
      }
  return out;
}

Polynomial Polynomial::scaled(double s) const {
  Polynomial out = *this;
  for (auto& [e, c] : out.coef_) c *= s;
  return out;
}

double Polynomial::relative_difference(const Polynomial& other) const {
  double scale = 0.0, diff = 0.0;
  for (const auto& [e, c] : other.coef_) scale = std::max(scale, std::abs(c));
  for (const auto& [e, c] : coef_) diff = std::max(diff, std::abs(c - other.coefficient(e)));
  for (const auto& [e, c] : other.coef_) diff = std::max(diff, std::abs(c - coefficient(e)));
  return scale > 0.0 ? diff / scale : diff;
}

double qk_laplacian_constant(int k, int dim) { return 2.0 * k * (2.0 * k + dim - 2.0); }

Polynomial qk_polynomial(const ScalarField& f, int k) {
  if (k < 0 || k > kMaxQk)
    throw Error(ErrorCode::invalid_argument,
                "Q_k supported for 0 <= k <= " + std::to_string(kMaxQk) + " (coefficient growth)");
  const Grid& g = f.grid();
  const int dim = g.dim;
  const int p = 2 * k;
  // trapezoid moments mu[a0][a1][a2] = integral y^a f(y) dy for a_i <= 2k
  const int na = p + 1;
  std::vector<double> mu(static_cast<std::size_t>(na) * na * na, 0.0);
  auto midx = [na](int a, int b, int c) { return (static_cast<std::size_t>(a) * na + b) * na + c; };
  std::array<std::vector<double>, 3> pw;
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    double v = f[flat];
    if (v == 0.0) continue;
    auto ijk = g.unflatten(flat);
    double w = v;
    for (int a = 0; a < dim; ++a) {
      w *= g.spacing[a];
      if (ijk[a] == 0 || ijk[a] == g.n[a] - 1) w *= 0.5;
    }
    Point x = g.node(flat);
    for (int a = 0; a < 3; ++a) {
      pw[a].assign(na, 0.0);
      pw[a][0] = 1.0;
      for (int e = 1; e < na; ++e) pw[a][e] = pw[a][e - 1] * (a < dim ? x[a] : 0.0);
    }
    for (int a = 0; a < na; ++a)
      for (int b = 0; b < na; ++b)
        for (int c = 0; c < (dim == 3 ? na : 1); ++c) mu[midx(a, b, c)] += w * pw[0][a] * pw[1][b] * pw[2][c];
  }
  auto binom = [](int n, int r) {
    double b = 1.0;
    for (int i = 1; i <= r; ++i) b = b * (n - r + i) / i;
    return b;
  };
  auto fact = [](int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
  };
  Polynomial q(dim);
  // |x - y|^{2k} = sum over k0 + k1 + k2 = k of multinomial * prod (x_i - y_i)^{2 k_i}
  for (int k0 = 0; k0 <= k; ++k0)
    for (int k1 = 0; k1 + k0 <= k; ++k1) {
      int k2 = k - k0 - k1;
      if (dim == 2 && k2 != 0) continue;
      double multi = fact(k) / (fact(k0) * fact(k1) * fact(k2));
      for (int a0 = 0; a0 <= 2 * k0; ++a0)
        for (int a1 = 0; a1 <= 2 * k1; ++a1)
          for (int a2 = 0; a2 <= 2 * k2; ++a2) {
            int b0 = 2 * k0 - a0, b1 = 2 * k1 - a1, b2 = 2 * k2 - a2;
            double sign = ((b0 + b1 + b2) % 2 == 0) ? 1.0 : -1.0;
            double c = multi * binom(2 * k0, a0) * binom(2 * k1, a1) * binom(2 * k2, a2) * sign * mu[midx(b0, b1, b2)];
            q[{a0, a1, a2}] += c;
          }
    }
  return q;
}

}  // namespace tat
