// End-to-end acceptance run: one PASS/FAIL line per criterion.
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "tat/analysis.hpp"
#include "tat/fbp.hpp"
#include "tat/forward.hpp"
#include "tat/series.hpp"
#include "tat/wavesim.hpp"

using namespace tat;
using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel_l2(std::span<const double> a, std::span<const double> ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ref[i]) * (a[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  return std::sqrt(num / den);
}

double rel_l2_where(const ScalarField& a, const ScalarField& ref, const std::function<bool(const Point&)>& keep) {
  std::vector<double> x, y;
  for (std::size_t q = 0; q < a.size(); ++q)
    if (keep(a.grid().node(q))) {
      x.push_back(a[q]);
      y.push_back(ref[q]);
    }
  return rel_l2(x, y);
}

QuadratureSpec closed_form() {
  QuadratureSpec q;
  q.mode = QuadratureMode::closed_form;
  return q;
}

TatData circle_data(const PhantomSpec& s, int n_det, int n_t, DataKind kind = DataKind::integral) {
  return spherical_forward(s, DetectorGeometry::circle({0, 0, 0}, 1.0, n_det), n_t, 2.0 / (n_t - 1), kind,
                           closed_form());
}

TatData box_data(const PhantomSpec& s, int dim, int m_max, double t_max) {
  auto geom = dim == 2 ? DetectorGeometry::square_boundary({0, 0, 0}, 1.0, m_max + 2)
                       : DetectorGeometry::cube_boundary({0, 0, 0}, 1.0, m_max + 2);
  int nt = static_cast<int>(std::ceil(t_max * (m_max + 1) * 0.8)) + 40;
  return spherical_forward(s, geom, nt, t_max / (nt - 1), DataKind::integral, closed_form());
}

TatData truncate(const TatData& d, int n) {
  std::vector<double> v;
  for (std::size_t i = 0; i < d.n_detectors(); ++i) {
    auto r = d.row(i);
    v.insert(v.end(), r.begin(), r.begin() + n);
  }
  return TatData(d.geometry(), d.kind(), n, d.dt(), std::move(v));
}

TatData add_noise(const TatData& d, double level, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  double rms = l2_norm(d.values()) / std::sqrt(static_cast<double>(d.values().size()));
  std::vector<double> v(d.values().begin(), d.values().end());
  for (double& x : v) x += level * rms * n01(rng);
  return TatData(d.geometry(), d.kind(), d.n_samples(), d.dt(), std::move(v));
}

ScalarField smooth_speed(const Grid& g, double amplitude) {
  std::vector<double> cv(g.size());
  for (std::size_t q = 0; q < g.size(); ++q) {
    Point x = g.node(q);
    cv[q] = 1.0 + amplitude * std::sin(1.3 * x[0] + 0.4) * std::cos(1.1 * x[1]);
  }
  return ScalarField(g, cv);
}

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

void fbp_round_trip() {
  omp_set_num_threads(1);
  auto t0 = Clock::now();
  PhantomSpec s;
  s.add(Primitive::bump2(0.2, 0.0, 0.3, 1.0));
  auto data = circle_data(s, 256, 512);
  Grid grid = Grid::centered(2, 128, 2.0);
  auto rec = fbp_invert(data, grid, FbpVariant::kunyansky_2d);
  double secs = seconds_since(t0);
  omp_set_num_threads(omp_get_num_procs());
  double e = rel_l2(rec.values(), rasterize_phantom(s, grid).values());
  report(1, "2D FBP round trip", e <= 0.05 && secs <= 60.0,
         fmt("kunyansky_2d rel_l2 %.4f (<= 0.05), %.2f s single-threaded (<= 60)", e, secs));
}

void fbp_3d_concordance() {
  auto t0 = Clock::now();
  PhantomSpec s;
  s.add(Primitive::bump3(0.1, -0.05, 0.08, 0.4, 1.0));
  // 64 longitudes: 64 detectors on every meridian great circle
  auto geom = DetectorGeometry::sphere({0, 0, 0}, 1.0, 32, 64);
  auto data = spherical_forward(s, geom, 256, 2.0 / 255, DataKind::integral, closed_form());
  Grid grid = Grid::centered(3, 48, 1.4);
  std::vector<ScalarField> recs;
  for (FbpVariant v : {FbpVariant::fpr3d_laplacian, FbpVariant::fpr3d_d2t, FbpVariant::fpr3d_ddt_chain,
                       FbpVariant::kunyansky_3d})
    recs.push_back(fbp_invert(data, grid, v));
  double secs = seconds_since(t0);
  double worst = 0.0;
  for (std::size_t a = 0; a < recs.size(); ++a)
    for (std::size_t b = a + 1; b < recs.size(); ++b)
      worst = std::max(worst, rel_l2(recs[a].values(), recs[b].values()));
  report(2, "3D variant concordance", worst <= 0.02 && secs <= 600.0,
         fmt("worst pairwise rel_l2 %.4f (<= 0.02), %.1f s (<= 600)", worst, secs));
}

void norton_vs_fbp() {
  PhantomSpec s;
  s.add(Primitive::bump2(0.2, 0.0, 0.3, 1.0));
  auto data = circle_data(s, 256, 512);
  Grid grid = Grid::centered(2, 128, 2.0);
  double e = rel_l2(norton2d(data, grid).values(), fbp_invert(data, grid, FbpVariant::kunyansky_2d).values());
  report(3, "Norton vs backprojection", e <= 0.03, fmt("rel_l2 %.4f (<= 0.03)", e));
}

void cubic_cost() {
  PhantomSpec s;
  s.add(Primitive::bump3(0.1, -0.05, 0.08, 0.5, 1.0));
  auto time_of = [&](int m) {
    auto data = box_data(s, 3, m, 2.0 * std::sqrt(3.0));
    std::vector<double> t;
    for (int r = 0; r < 3; ++r) {
      auto t0 = Clock::now();
      auto f = cubic_series(data);
      t.push_back(seconds_since(t0));
    }
    std::sort(t.begin(), t.end());
    return t[1];
  };
  double t32 = time_of(32), t64 = time_of(64);
  double ratio = t64 / t32;
  report(4, "cubic series cost scaling", ratio <= 12.0 && t64 <= 30.0,
         fmt("median m=32 %.3f s, m=64 %.3f s, ratio %.2f (<= 12), m=64 <= 30 s", t32, t64, ratio));
}

void exterior_dichotomy() {
  PhantomSpec s;
  s.add(Primitive::bump2(-0.3, 0.2, 0.25, 1.0));
  s.add(Primitive::bump2(0.3, -0.3, 0.2, 0.7));
  // outside both the unit circle and the square [-1, 1]^2
  s.add(Primitive::bump2(1.3, -0.2, 0.2, 0.8));
  s.add(Primitive::bump2(-0.6, -1.3, 0.25, 0.6));
  s.add(Primitive::bump2(1.1, 1.1, 0.3, 1.0));
  auto inside = [](const Point& x) { return std::hypot(x[0], x[1]) < 0.7; };
  Grid grid = Grid::centered(2, 128, 2.0);
  auto fbp = fbp_invert(circle_data(s, 256, 512), grid, FbpVariant::kunyansky_2d);
  double e_fbp = rel_l2_where(fbp, rasterize_phantom(s, grid), inside);
  auto ser = square_series_2d(box_data(s, 2, 126, 2.0 * std::sqrt(2.0) + 1.0));
  double e_ser = rel_l2_where(ser, rasterize_phantom(s, ser.grid()), inside);
  report(5, "exterior-support dichotomy", e_fbp > 0.10 && e_ser <= 0.10,
         fmt("interior rel_l2: backprojection %.4f (> 0.10), square series %.4f (<= 0.10)", e_fbp, e_ser));
}

void range_necessity() {
  PhantomSpec s;
  s.add(Primitive::bump2(0.2, -0.1, 0.35, 1.0));
  s.add(Primitive::bump2(-0.3, 0.35, 0.2, 0.6));
  auto clean = circle_data(s, 256, 512, DataKind::mean);
  auto check = [](const TatData& d) {
    auto r = moment_check(d, 3);
    r.append(orthogonality_check(d, 16, 10));
    return r;
  };
  auto rc = check(clean), rn = check(add_noise(clean, 0.1, 17));
  double ratio = rn.max_residual() / rc.max_residual();
  report(6, "range conditions", rc.max_residual() <= 1e-2 && ratio >= 10.0,
         fmt("clean max residual %.3e (<= 1e-2), 10%% noise %.3e, ratio %.1f (>= 10)", rc.max_residual(),
             rn.max_residual(), ratio));
}

void nonuniqueness() {
  PhantomSpec base;
  base.add(Primitive::bump2(0.25, 0.45, 0.3, 1.0));
  base.add(Primitive::disk(-0.4, 0.3, 0.15, 0.5));
  const double ang = 0.3;
  double odd = nonuniqueness_probe(DetectorGeometry::line_segment({0, 0, 0}, 1.5, ang, 33),
                                   odd_phantom(base, {0, 0, 0}, {std::cos(ang), std::sin(ang), 0.0}));
  auto cox = coxeter_phantom(base);
  double c1 = nonuniqueness_probe(DetectorGeometry::line_segment({0, 0, 0}, 1.5, 0.0, 33), cox);
  double c2 = nonuniqueness_probe(DetectorGeometry::line_segment({0, 0, 0}, 1.5, pi / 2, 33), cox);
  double cw = std::max(c1, c2);
  report(7, "odd-phantom probes", odd <= 1e-10 && cw <= 1e-10,
         fmt("odd about line %.2e, Coxeter (both axes) %.2e (<= 1e-10)", odd, cw));
}

void limited_view() {
  auto sq = Primitive::rect(0.25, 0.0, 0.2, 0.2, 1.0);
  PhantomSpec s;
  s.add(sq);
  QuadratureSpec q;
  q.n_angular = 2048;
  auto data = spherical_forward(s, DetectorGeometry::circle({0, 0, 0}, 1.0, 256), 512, 2.0 / 511,
                                DataKind::integral, q);
  Grid grid = Grid::centered(2, 128, 1.4);
  // detectors on the left half circle see the vertical edges only
  auto rec = fbp_invert(restrict_to_arc(data, pi / 2, pi), grid, FbpVariant::kunyansky_2d);
  auto m = compute_metrics(rasterize_phantom(s, grid), rec, rect_edges(sq));
  double visible = 0.5 * (m.edges[0].value + m.edges[1].value);
  double invisible = 0.5 * (m.edges[2].value + m.edges[3].value);
  double ratio = invisible / visible;
  report(8, "limited view", ratio <= 0.5,
         fmt("edge sharpness invisible %.3f / visible %.3f = %.3f (<= 0.5)", invisible, visible, ratio));
}

void time_reversal_checks() {
  auto cube = DetectorGeometry::cube_boundary({0, 0, 0}, 1.0, 41);
  Grid g3 = cube.node_grid();
  PhantomSpec s3;
  s3.add(Primitive::bump3(0.15, -0.1, 0.05, 0.45, 1.0));
  auto f3 = rasterize_phantom(s3, g3);
  auto one = ScalarField::constant(g3, 1.0);
  FdConfig cfg;
  cfg.T = 1.5 * 2.0 * std::sqrt(3.0);
  double e3 = rel_l2(time_reversal(fd_forward(f3, one, cube, cfg), one, cfg).values(), f3.values());

  auto sq = DetectorGeometry::square_boundary({0, 0, 0}, 1.0, 61);
  Grid g2 = sq.node_grid();
  auto c = smooth_speed(g2, 0.2);
  PhantomSpec s2;
  s2.add(Primitive::bump2(0.2, -0.1, 0.4, 1.0));
  auto f2 = rasterize_phantom(s2, g2);
  const double T = 1.5 * 2.0 * std::sqrt(2.0);
  FdConfig cfg2;
  cfg2.T = 2.0 * T;
  auto d = fd_forward(f2, c, sq, cfg2);
  std::vector<double> errs;
  std::string list;
  for (int i = 0; i <= 4; ++i) {
    double Ti = T * (1.0 + 0.25 * i);
    int n = std::min(d.n_samples(), static_cast<int>(std::round(Ti / d.dt())) + 1);
    errs.push_back(rel_l2(time_reversal(truncate(d, n), c).values(), f2.values()));
    list += fmt("%s%.4f", i ? " " : "", errs.back());
  }
  bool monotone = true;
  for (std::size_t i = 1; i < errs.size(); ++i) monotone = monotone && errs[i] < errs[i - 1];
  bool speed_ok = c.min() >= 0.8 && c.max() <= 1.2;
  report(9, "time reversal", e3 <= 0.05 && monotone && speed_ok,
         fmt("3D rel_l2 %.4f (<= 0.05); 2D variable speed errors T..2T: %s (strictly decreasing)", e3,
             list.c_str()));
}

void eigen_expansion() {
  auto geom = DetectorGeometry::square_boundary({0, 0, 0}, 1.0, 48);
  Grid g = geom.node_grid();
  PhantomSpec s;
  s.add(Primitive::bump2(0.15, -0.1, 0.45, 1.0));
  auto f = rasterize_phantom(s, g);
  FdConfig cfg;
  cfg.T = 10.0;
  auto c = smooth_speed(g, 0.1);
  double e_var = rel_l2(eigen_expand_variable_speed(fd_forward(f, c, geom, cfg), c, 600).values(), f.values());
  auto one = ScalarField::constant(g, 1.0);
  auto rec1 = eigen_expand_variable_speed(fd_forward(f, one, geom, cfg), one, 600);
  auto ser = square_series_2d(box_data(s, 2, 46, 2.0 * std::sqrt(2.0)));
  double e_cross = ser.grid() == g ? rel_l2(rec1.values(), ser.values()) : 1.0;
  report(10, "variable-speed eigenfunction expansion", e_var <= 0.10 && e_cross <= 0.05,
         fmt("48x48, k_max 600: variable speed rel_l2 %.4f (<= 0.10), constant speed vs square series %.4f (<= 0.05)",
             e_var, e_cross));
}

void qk_identity() {
  double worst = 0.0;
  for (int dim : {2, 3}) {
    Grid g = Grid::centered(dim, dim == 2 ? 65 : 25, 2.0);
    PhantomSpec s;
    if (dim == 2) {
      s.add(Primitive::bump2(0.15, -0.2, 0.4, 1.0));
      s.add(Primitive::bump2(-0.3, 0.25, 0.3, 0.7));
    } else {
      s.add(Primitive::bump3(0.1, -0.2, 0.15, 0.5, 1.0));
    }
    auto f = rasterize_phantom(s, g);
    for (int k = 1; k <= 2; ++k) {
      auto lhs = qk_polynomial(f, k).laplacian();
      auto rhs = qk_polynomial(f, k - 1).scaled(qk_laplacian_constant(k, dim));
      worst = std::max(worst, lhs.relative_difference(rhs));
    }
  }
  report(11, "moment polynomial Laplacian identity", worst <= 1e-6,
         fmt("worst relative difference %.2e over k = 1, 2 and d = 2, 3 (<= 1e-6)", worst));
}

}  // namespace

int main() {
  const std::pair<int, void (*)()> checks[] = {
      {1, fbp_round_trip}, {2, fbp_3d_concordance}, {3, norton_vs_fbp},    {4, cubic_cost},
      {5, exterior_dichotomy}, {6, range_necessity}, {7, nonuniqueness},  {8, limited_view},
      {9, time_reversal_checks}, {10, eigen_expansion}, {11, qk_identity},
  };
  for (auto [id, run] : checks) {
    try {
      run();
    } catch (const std::exception& e) {
      report(id, "exception", false, e.what());
    }
  }
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
