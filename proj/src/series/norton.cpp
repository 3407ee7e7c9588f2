#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dense.hpp"
#include "tat/bessel.hpp"
#include "tat/forward.hpp"
#include "tat/series.hpp"

namespace tat {

using std::numbers::pi;
using cplx = std::complex<double>;

double NortonModes::eval(const Point& x) const {
  const double dx = x[0] - center[0], dy = x[1] - center[1];
  const double r = std::hypot(dx, dy);
  if (r >= R) return 0.0;
  const int nr = static_cast<int>(rho.size());
  double u = r / R * (nr - 1);
  int l = std::min(static_cast<int>(u), nr - 2);
  double w = u - l;
  const cplx e1 = r > 0.0 ? cplx(dx / r, dy / r) : cplx(1.0, 0.0);
  cplx e = 1.0;
  double v = 0.0;
  for (int m = 0; m <= m_max; ++m) {
    cplx fm = (1.0 - w) * at(m, l) + w * at(m, l + 1);
    v += (m == 0 ? 1.0 : 2.0) * (fm * e).real();
    e *= e1;
  }
  return v;
}

NortonModes norton2d_modes(const TatData& in, const NortonOptions& opt) {
  const auto& geom = in.geometry();
  if (geom.kind() == GeometryKind::arc)
    throw Error(ErrorCode::unsupported_geometry, "the Fourier-Hankel method needs a full circle, not an arc");
  if (geom.kind() != GeometryKind::circle)
    throw Error(ErrorCode::unsupported_geometry,
                std::string("the Fourier-Hankel method needs a circle, got ") + to_string(geom.kind()));
  if (in.kind() == DataKind::pressure)
    throw Error(ErrorCode::unsupported_conversion, "the Fourier-Hankel method needs circular means or integrals");
  const double R = geom.size();
  if (in.t_max() < 2.0 * R * (1.0 - 1e-9))
    throw Error(ErrorCode::invalid_argument, "radial extent of the data must reach the detector diameter 2R");
  const int nd = static_cast<int>(in.n_detectors());
  const int m_max = opt.m_max < 0 ? nd / 2 - 1 : opt.m_max;
  if (m_max >= (nd + 1) / 2)
    throw Error(ErrorCode::invalid_argument, "m_max = " + std::to_string(m_max) + " exceeds the Nyquist limit " +
                                                 std::to_string((nd + 1) / 2 - 1) + " of " + std::to_string(nd) +
                                                 " detectors");
  TatData g = in.kind() == DataKind::integral ? in : convert_kind(in, DataKind::integral);

  const int nt = g.n_samples();
  const double dt = g.dt();
  const double dl = opt.dlambda > 0.0 ? opt.dlambda : pi / (2.0 * g.t_max());
  const double lmax = opt.lambda_max > 0.0 ? opt.lambda_max : pi / dt;
  const int nl = static_cast<int>(std::floor(lmax / dl + 1e-9));
  if (nl < 2) throw Error(ErrorCode::invalid_argument, "lambda grid has fewer than two nodes");

  // Hankel-type transforms of every detector row: (J0 + i Y0)(lambda_j r_k) against g dr
  std::vector<double> kj(static_cast<std::size_t>(nl) * nt), ky(kj.size());
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nl; ++j) {
    const double lam = (j + 1) * dl;
    for (int k = 1; k < nt; ++k) {
      double w = dt * (k == nt - 1 ? 0.5 : 1.0);
      kj[static_cast<std::size_t>(k) * nl + j] = w * bessel_j(0, lam * k * dt);
      ky[static_cast<std::size_t>(k) * nl + j] = opt.use_hankel ? w * bessel_y(0, lam * k * dt) : 0.0;
    }
  }
  std::vector<double> cj(static_cast<std::size_t>(nl) * nd), cy(cj.size());
  matmul(nl, nd, nt, kj.data(), g.values().data(), cj.data());
  if (opt.use_hankel) matmul(nl, nd, nt, ky.data(), g.values().data(), cy.data());

  // angular coefficients and division by H_m(lambda R) or J_m(lambda R)
  std::vector<cplx> F(static_cast<std::size_t>(nl) * (m_max + 1));
  std::vector<double> jm(static_cast<std::size_t>(nl) * (m_max + 1));
  {
    std::vector<cplx> buf(nd), out(nd);
    fftw_plan plan = fftw_plan_dft_1d(nd, reinterpret_cast<fftw_complex*>(buf.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    std::vector<double> jv, yv;
    for (int j = 0; j < nl; ++j) {
      const double lam = (j + 1) * dl;
      for (int i = 0; i < nd; ++i)
        buf[i] = cplx(cj[static_cast<std::size_t>(i) * nl + j], cy[static_cast<std::size_t>(i) * nl + j]) / (2.0 * pi);
      fftw_execute(plan);
      bessel_j_orders(m_max, lam * R, jv);
      if (opt.use_hankel) bessel_y_orders(m_max, lam * R, yv);
      for (int m = 0; m <= m_max; ++m) {
        cplx gm = out[m] * std::polar(1.0 / nd, -m * geom.angle0());
        std::size_t q = static_cast<std::size_t>(m) * nl + j;
        jm[q] = jv[m];
        if (opt.use_hankel) {
          cplx h(jv[m], yv[m]);
          F[q] = std::isfinite(std::abs(h)) ? gm / h : 0.0;
        } else {
          F[q] = gm.real();
        }
      }
    }
    fftw_destroy_plan(plan);
  }
  if (!opt.use_hankel) {
    for (int m = 0; m <= m_max; ++m) {
      double peak = 0.0;
      for (int j = 0; j < nl; ++j) peak = std::max(peak, std::abs(jm[static_cast<std::size_t>(m) * nl + j]));
      for (int j = 0; j < nl; ++j) {
        std::size_t q = static_cast<std::size_t>(m) * nl + j;
        F[q] = std::abs(jm[q]) < opt.mask_threshold * peak ? 0.0 : F[q] / jm[q];
      }
    }
  }

  NortonModes out;
  out.R = R;
  out.center = geom.center();
  out.m_max = m_max;
  const int nr = opt.n_radial > 1 ? opt.n_radial : nt;
  out.rho.resize(nr);
  for (int l = 0; l < nr; ++l) out.rho[l] = R * l / (nr - 1);
  out.coef.assign(static_cast<std::size_t>(m_max + 1) * nr, 0.0);

  // inverse Hankel transform; the m = 0 integrand is linear at lambda = 0, so the
  // first node carries the Euler-Maclaurin end correction
#pragma omp parallel
  {
    std::vector<double> jv;
    std::vector<cplx> acc(m_max + 1);
#pragma omp for schedule(static)
    for (int l = 0; l < nr; ++l) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int j = 0; j < nl; ++j) {
        const double lam = (j + 1) * dl;
        double w = lam * dl * (j == nl - 1 ? 0.5 : 1.0);
        bessel_j_orders(m_max, lam * out.rho[l], jv);
        for (int m = 0; m <= m_max; ++m) {
          double wm = (m == 0 && j == 0) ? w * 13.0 / 12.0 : w;
          acc[m] += wm * jv[m] * F[static_cast<std::size_t>(m) * nl + j];
        }
      }
      for (int m = 0; m <= m_max; ++m) out.coef[static_cast<std::size_t>(m) * nr + l] = acc[m];
    }
  }
  return out;
}

ScalarField norton2d(const TatData& data, const Grid& grid, const NortonOptions& opt,
                     std::vector<std::string>* warnings) {
  grid.validate();
  if (data.dim() != 2 || grid.dim != 2)
    throw Error(ErrorCode::dimension_mismatch, "the Fourier-Hankel method is two-dimensional");
  NortonModes modes = norton2d_modes(data, opt);
  std::vector<double> v(grid.size());
  int outside = 0;
#pragma omp parallel for schedule(static) reduction(+ : outside)
  for (std::size_t q = 0; q < v.size(); ++q) {
    Point x = grid.node(q);
    if (distance(x, modes.center, 2) >= modes.R) ++outside;
    v[q] = modes.eval(x);
  }
  if (warnings && data.kind() == DataKind::mean)
    warnings->push_back("mean data converted to circular integrals");
  if (warnings && outside > 0)
    warnings->push_back(std::to_string(outside) + " grid nodes lie outside the detector circle and were set to 0");
  for (double x : v)
    if (!std::isfinite(x)) throw Error(ErrorCode::numeric_failure, "non-finite value in reconstruction");
  return ScalarField(grid, std::move(v));
}

}  // namespace tat
