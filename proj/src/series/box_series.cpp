#include <fftw3.h>
#include <gsl/gsl_sf_bessel.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "dense.hpp"
#include "tat/forward.hpp"
#include "tat/series.hpp"

namespace tat {

using std::numbers::pi;

double box_eigenfunction(int dim, double side, const Point& origin, const std::array<int, 3>& m, const Point& x) {
  double v = std::pow(2.0 / side, 0.5 * dim);
  for (int a = 0; a < dim; ++a) v *= std::sin(pi * m[a] * (x[a] - origin[a]) / side);
  return v;
}

Grid series_grid(const DetectorGeometry& geom, int m_max) {
  if (!geom.is_box_boundary())
    throw Error(ErrorCode::unsupported_geometry, "sine series need a square or cube boundary");
  return Grid::centered(geom.dim(), m_max + 2, 2.0 * geom.size(), geom.center());
}

namespace {

// FFTW planning is not thread-safe
std::mutex plan_mutex;

struct R2R {
  fftw_plan plan = nullptr;
  R2R(int rank, const int* n, fftw_r2r_kind kind) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    int total = 1;
    for (int i = 0; i < rank; ++i) total *= n[i];
    std::vector<double> tmp(total);
    std::vector<fftw_r2r_kind> kinds(rank, kind);
    plan = fftw_plan_r2r(rank, n, tmp.data(), tmp.data(), kinds.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  ~R2R() {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(plan);
  }
  R2R(const R2R&) = delete;
  R2R& operator=(const R2R&) = delete;
  void run(double* inout) const { fftw_execute_r2r(plan, inout, inout); }
};

struct BoxSetup {
  int dim;
  int n;       // nodes per side
  int m_max;
  double L;
  double h;
  Point origin;
  TatData g;
};

BoxSetup prepare(const TatData& in, const SeriesOptions& opt, int want_dim) {
  const auto& geom = in.geometry();
  if (!geom.is_box_boundary())
    throw Error(ErrorCode::unsupported_geometry,
                std::string("sine series need a square or cube boundary, got ") + to_string(geom.kind()));
  if (want_dim != 0 && in.dim() != want_dim)
    throw Error(ErrorCode::dimension_mismatch, want_dim == 3 ? "cubic_series needs 3D cube data"
                                                             : "square_series_2d needs 2D square data");
  if (in.kind() == DataKind::pressure)
    throw Error(ErrorCode::unsupported_conversion, "sine series need spherical means or integrals, not pressure");
  if (in.n_samples() < 4) throw Error(ErrorCode::invalid_argument, "too few radial samples");
  if (opt.interp_order < 2 || opt.interp_order > 16)
    throw Error(ErrorCode::invalid_argument, "interpolation order must lie in [2, 16]");
  const int n = static_cast<int>(geom.n_aux());
  const int m_max = opt.m_max > 0 ? opt.m_max : n - 2;
  if (m_max > n - 2)
    throw Error(ErrorCode::invalid_argument, "m_max = " + std::to_string(m_max) + " exceeds the " +
                                                 std::to_string(n - 2) + " interior detectors per side");
  const double L = 2.0 * geom.size();
  Point o = geom.center();
  for (int a = 0; a < in.dim(); ++a) o[a] -= geom.size();
  return {in.dim(), n, m_max, L, L / (n - 1), o,
          in.kind() == DataKind::integral ? in : convert_kind(in, DataKind::integral)};
}

// I(y, lambda_j) for every detector, column-major (lambda fastest)
struct LambdaMesh {
  double dl;
  int count;
  int first;  // lowest usable node
  std::vector<double> I;
};

LambdaMesh lambda_mesh(const BoxSetup& s, const SeriesOptions& opt) {
  const TatData& g = s.g;
  const int nt = g.n_samples();
  const double dt = g.dt();
  const int nd = static_cast<int>(g.n_detectors());
  const double lam_need = pi * std::sqrt(static_cast<double>(s.dim)) * s.m_max / s.L;
  LambdaMesh mesh;
  mesh.dl = opt.dlambda > 0.0 ? opt.dlambda : pi / (2.0 * g.t_max());
  mesh.first = s.dim == 2 ? 1 : 0;
  int N = 0;
  if (s.dim == 3) {
    // the cosine transform fixes dl * dt * N = pi
    N = std::max(nt - 1, static_cast<int>(std::lround(pi / (mesh.dl * dt))));
    mesh.dl = pi / (N * dt);
  }
  const int half = opt.interp_order / 2;
  mesh.count = static_cast<int>(std::ceil(lam_need / mesh.dl)) + half + 2;
  const double lam_top = (mesh.count - 1) * mesh.dl;
  if (lam_top > pi / dt * (1.0 + 1e-12))
    throw Error(ErrorCode::invalid_argument,
                "lambda mesh must reach lambda_max = " + std::to_string(lam_top) + " but the radial sampling dt = " +
                    std::to_string(dt) + " only resolves pi/dt = " + std::to_string(pi / dt) +
                    "; use smaller dt or fewer modes");
  mesh.I.assign(static_cast<std::size_t>(mesh.count) * nd, 0.0);

  if (s.dim == 3) {
    // I = 1/(4 pi) int g/t cos(lambda t) dt through a DCT-I of length N + 1
    const int len = N + 1;
    R2R dct(1, &len, FFTW_REDFT00);
#pragma omp parallel
    {
      std::vector<double> buf(len);
#pragma omp for schedule(static)
      for (int i = 0; i < nd; ++i) {
        std::fill(buf.begin(), buf.end(), 0.0);
        auto row = g.row(i);
        for (int k = 1; k < nt; ++k) buf[k] = row[k] / (k * dt);
        if (N > nt - 1) buf[nt - 1] *= 0.5;
        dct.run(buf.data());
        for (int j = 0; j < mesh.count; ++j)
          mesh.I[static_cast<std::size_t>(i) * mesh.count + j] = dt / (8.0 * pi) * buf[j];
      }
    }
  } else {
    // I = -1/4 int Y0(lambda t) g dt by trapezoid; Y0's log singularity meets g(0) = 0
    std::vector<double> K(static_cast<std::size_t>(mesh.count) * nt, 0.0);
    for (int j = mesh.first; j < mesh.count; ++j)
      for (int k = 1; k < nt; ++k)
        K[static_cast<std::size_t>(k) * mesh.count + j] =
            -0.25 * dt * (k == nt - 1 ? 0.5 : 1.0) * gsl_sf_bessel_Y0(j * mesh.dl * k * dt);
    matmul(mesh.count, nd, nt, K.data(), g.values().data(), mesh.I.data());
  }
  return mesh;
}

// Lagrange weights for interpolating at x from nodes start..start+p-1 (unit spacing)
void lagrange(double x, int start, int p, double* w) {
  for (int a = 0; a < p; ++a) {
    double v = 1.0;
    for (int b = 0; b < p; ++b)
      if (b != a) v *= (x - (start + b)) / static_cast<double>(a - b);
    w[a] = v;
  }
}

SeriesCoefficients coefficients(const TatData& data, const SeriesOptions& opt, int want_dim) {
  const BoxSetup s = prepare(data, opt, want_dim);
  const LambdaMesh mesh = lambda_mesh(s, opt);
  const int d = s.dim, n = s.n, M = s.m_max, nf = n - 2;
  const int p = opt.interp_order;
  const std::size_t face_len = d == 2 ? nf : static_cast<std::size_t>(nf) * nf;
  const std::size_t perp_len = d == 2 ? M : static_cast<std::size_t>(M) * M;

  // detector index of every interior face node, tangential axes in increasing order
  const Grid ng = s.g.geometry().node_grid();
  const std::vector<int> lut = s.g.geometry().node_lookup();
  std::vector<std::vector<int>> face_det(2 * d);
  for (int a = 0; a < d; ++a)
    for (int side = 0; side < 2; ++side) {
      auto& fd = face_det[2 * a + side];
      fd.reserve(face_len);
      for (std::size_t q = 0; q < face_len; ++q) {
        std::array<int, 3> ijk{0, 0, 0};
        int u = static_cast<int>(d == 2 ? q : q / nf) + 1, v = static_cast<int>(d == 2 ? 0 : q % nf) + 1;
        int t = 0;
        for (int b = 0; b < d; ++b) {
          if (b == a) ijk[b] = side * (n - 1);
          else ijk[b] = t++ == 0 ? u : v;
        }
        fd.push_back(lut[ng.index(ijk[0], ijk[1], ijk[2])]);
      }
    }

  // face sine transforms of I for every lambda node: S[face][j][m_perp]
  const int nj = mesh.count;
  std::vector<double> S(static_cast<std::size_t>(2 * d) * nj * perp_len, 0.0);
  const double face_scale = std::pow(0.5 * s.h, d - 1);
  const int dims[2] = {nf, nf};
  R2R dst(d - 1, dims, FFTW_RODFT00);
#pragma omp parallel
  {
    std::vector<double> buf(face_len);
#pragma omp for schedule(dynamic) collapse(2)
    for (int f = 0; f < 2 * d; ++f)
      for (int j = mesh.first; j < nj; ++j) {
        const auto& fd = face_det[f];
        for (std::size_t q = 0; q < face_len; ++q) buf[q] = mesh.I[static_cast<std::size_t>(fd[q]) * nj + j];
        dst.run(buf.data());
        double* out = S.data() + (static_cast<std::size_t>(f) * nj + j) * perp_len;
        for (std::size_t q = 0; q < perp_len; ++q) {
          std::size_t src = d == 2 ? q : (q / M) * nf + q % M;
          out[q] = face_scale * buf[src];
        }
      }
  }

  SeriesCoefficients c;
  c.dim = d;
  c.m_max = M;
  c.side = s.L;
  c.origin = s.origin;
  const std::size_t total = perp_len * M;
  c.alpha.assign(total, 0.0);
  const double norm = std::pow(2.0 / s.L, 0.5 * d);
#pragma omp parallel
  {
    std::vector<double> w(p);
#pragma omp for schedule(static)
    for (std::size_t q = 0; q < total; ++q) {
      std::array<int, 3> m{1, 1, 1};
      std::size_t r = q;
      for (int a = d - 1; a >= 0; --a) {
        m[a] = static_cast<int>(r % M) + 1;
        r /= M;
      }
      double mm = 0.0;
      for (int a = 0; a < d; ++a) mm += static_cast<double>(m[a]) * m[a];
      const double x = pi * std::sqrt(mm) / s.L / mesh.dl;
      int start = static_cast<int>(std::floor(x)) - p / 2 + 1;
      start = std::clamp(start, mesh.first, nj - p);
      lagrange(x, start, p, w.data());
      double acc = 0.0;
      for (int a = 0; a < d; ++a) {
        std::size_t perp = 0;
        for (int b = 0; b < d; ++b)
          if (b != a) perp = perp * M + (m[b] - 1);
        const double sign = m[a] % 2 == 0 ? 1.0 : -1.0;
        const double* lo = S.data() + (static_cast<std::size_t>(2 * a) * nj) * perp_len + perp;
        const double* hi = S.data() + (static_cast<std::size_t>(2 * a + 1) * nj) * perp_len + perp;
        double v = 0.0;
        for (int t = 0; t < p; ++t) {
          std::size_t off = static_cast<std::size_t>(start + t) * perp_len;
          v += w[t] * (sign * hi[off] - lo[off]);
        }
        acc += pi * m[a] / s.L * v;
      }
      c.alpha[q] = norm * acc;
    }
  }
  return c;
}

}  // namespace

SeriesCoefficients series_coefficients(const TatData& data, const SeriesOptions& opt) {
  return coefficients(data, opt, 0);
}

ScalarField series_synthesize(const SeriesCoefficients& c) {
  const int d = c.dim, M = c.m_max;
  Point center = c.origin;
  for (int a = 0; a < d; ++a) center[a] += 0.5 * c.side;
  Grid grid = Grid::centered(d, M + 2, c.side, center);
  std::vector<double> buf(c.alpha);
  const int dims[3] = {M, M, M};
  {
    R2R dst(d, dims, FFTW_RODFT00);
    dst.run(buf.data());
  }
  const double scale = std::pow(2.0 / c.side, 0.5 * d) / std::pow(2.0, d);
  std::vector<double> v(grid.size(), 0.0);
  for (std::size_t q = 0; q < buf.size(); ++q) {
    std::array<int, 3> ijk{0, 0, 0};
    std::size_t r = q;
    for (int a = d - 1; a >= 0; --a) {
      ijk[a] = static_cast<int>(r % M) + 1;
      r /= M;
    }
    v[grid.index(ijk[0], ijk[1], ijk[2])] = scale * buf[q];
  }
  for (double x : v)
    if (!std::isfinite(x)) throw Error(ErrorCode::numeric_failure, "non-finite value in reconstruction");
  return ScalarField(grid, std::move(v));
}

ScalarField cubic_series(const TatData& data, const SeriesOptions& opt) {
  return series_synthesize(coefficients(data, opt, 3));
}

ScalarField square_series_2d(const TatData& data, const SeriesOptions& opt) {
  return series_synthesize(coefficients(data, opt, 2));
}

}  // namespace tat
