#include <cmath>

#include "doctest.h"
#include "tat/forward.hpp"
#include "tat/wavesim.hpp"

using namespace tat;

namespace {

double rel_l2(std::span<const double> a, std::span<const double> ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ref[i]) * (a[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  return std::sqrt(num / den);
}

// Kirchhoff pressure from closed-form spherical means, differenced on a grid
// `refine` times finer than dt and subsampled.
TatData kirchhoff_pressure(const PhantomSpec& s, const DetectorGeometry& geom, int n_samples, double dt, int refine) {
  QuadratureSpec cf;
  cf.mode = QuadratureMode::closed_form;
  auto fine = pressure_from_means(
      spherical_forward(s, geom, (n_samples - 1) * refine + 1, dt / refine, DataKind::mean, cf));
  std::vector<double> v(geom.count() * n_samples);
  for (std::size_t i = 0; i < geom.count(); ++i)
    for (int j = 0; j < n_samples; ++j) v[i * n_samples + j] = fine.at(i, j * refine);
  return TatData(geom, DataKind::pressure, n_samples, dt, std::move(v));
}

TatData truncate(const TatData& d, int n) {
  std::vector<double> v(d.n_detectors() * n);
  for (std::size_t i = 0; i < d.n_detectors(); ++i)
    for (int j = 0; j < n; ++j) v[i * n + j] = d.at(i, j);
  return TatData(d.geometry(), d.kind(), n, d.dt(), std::move(v));
}

}  // namespace

TEST_CASE("zero initial data stays zero") {
  Grid g = Grid::centered(2, 31, 2.0);
  FdConfig cfg;
  cfg.T = 0.5;
  auto d = fd_forward(ScalarField::zeros(g), ScalarField::constant(g, 1.0),
                      DetectorGeometry::circle({0, 0, 0}, 0.8, 16), cfg);
  for (double v : d.values()) CHECK(v == 0.0);
  auto sq = DetectorGeometry::square_boundary({0, 0, 0}, 1.0, 31);
  auto rec = time_reversal(TatData::zeros(sq, DataKind::pressure, 40, 0.02), ScalarField::constant(g, 1.0));
  CHECK(rec.max_abs() == 0.0);
}

TEST_CASE("configuration errors") {
  Grid g = Grid::centered(2, 21, 2.0);
  auto c = ScalarField::constant(g, 1.0);
  auto f = ScalarField::zeros(g);
  auto circ = DetectorGeometry::circle({0, 0, 0}, 0.8, 8);
  FdConfig bad;
  bad.cfl = 0.9;
  CHECK_THROWS_AS(fd_forward(f, c, circ, bad), Error);
  FdConfig small;
  small.T = 2.0;
  small.padding = 3;
  CHECK_THROWS_WITH(fd_forward(f, c, circ, small), doctest::Contains("at least 12 cells"));
  CHECK_THROWS_AS(fd_forward(f, ScalarField::constant(g, -1.0), circ, FdConfig{}), Error);
  try {
    time_reversal(TatData::zeros(circ, DataKind::pressure, 10, 0.01), c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unsupported_geometry);
  }
}

TEST_CASE("discrete energy is conserved") {
  Grid g = Grid::centered(2, 121, 3.0);
  std::vector<double> cv(g.size());
  for (std::size_t q = 0; q < g.size(); ++q) {
    Point x = g.node(q);
    cv[q] = 1.0 + 0.15 * std::sin(2.0 * x[0]) * std::cos(1.5 * x[1]);
  }
  ScalarField c(g, cv);
  PhantomSpec s;
  s.add(Primitive::bump2(0.1, 0.0, 0.4, 1.0));
  auto f = rasterize_phantom(s, g);
  WaveSolver w(c, stable_dt(c, 0.5));
  w.start(f.values());
  w.step();
  double e0 = w.energy();
  // the front reaches the edge (distance >= 1.0 at speed <= 1.15) after t ~ 0.87
  while (w.steps_taken() * w.dt() < 0.8) w.step();
  CHECK(std::abs(w.energy() - e0) <= 1e-3 * e0);
  CHECK(std::abs(w.energy() - e0) <= 1e-10 * e0);
}

TEST_CASE("3D traces match the Kirchhoff oracle with second-order convergence") {
  PhantomSpec s;
  s.add(Primitive::bump3(0.1, 0.0, -0.05, 0.5, 1.0));
  auto geom = DetectorGeometry::sphere({0, 0, 0}, 0.9, 8, 16);
  double errs[2];
  int idx = 0;
  for (int n : {41, 81}) {
    Grid g = Grid::centered(3, n, 2.0);
    FdConfig cfg;
    cfg.T = 2.0;
    FdReport rep;
    auto d = fd_forward(rasterize_phantom(s, g), ScalarField::constant(g, 1.0), geom, cfg, &rep);
    auto ref = kirchhoff_pressure(s, geom, d.n_samples(), d.dt(), 16);
    errs[idx++] = rel_l2(d.values(), ref.values());
    MESSAGE("n = " << n << " trace error " << errs[idx - 1] << ", residual at T " << rep.residual_at_T);
    // past the Huygens cutoff the enclosed field has left
    CHECK(rep.residual_at_T <= 1e-3);
    if (n == 81) CHECK(errs[1] <= 0.03);
  }
  double ratio = errs[0] / errs[1];
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 5.5);
}

TEST_CASE("3D time reversal at constant speed") {
  const int n = 41;
  auto cube = DetectorGeometry::cube_boundary({0, 0, 0}, 1.0, n);
  Grid g = cube.node_grid();
  PhantomSpec s;
  s.add(Primitive::bump3(0.15, -0.1, 0.05, 0.45, 1.0));
  auto f = rasterize_phantom(s, g);
  auto c = ScalarField::constant(g, 1.0);
  FdConfig cfg;
  cfg.T = 1.5 * 2.0 * std::sqrt(3.0);
  auto d = fd_forward(f, c, cube, cfg);
  std::vector<std::string> warnings;
  auto rec = time_reversal(d, c, cfg, &warnings);
  CHECK(warnings.empty());
  double err = rel_l2(rec.values(), f.values());
  MESSAGE("time reversal error " << err);
  CHECK(err <= 0.05);

  time_reversal(truncate(d, d.n_samples() / 2), c, cfg, &warnings);
  CHECK(warnings.size() == 1);
}

TEST_CASE("time reversal resolution refinement") {
  PhantomSpec s;
  s.add(Primitive::bump3(0.15, -0.1, 0.05, 0.5, 1.0));
  const double T = 1.5 * 2.0 * std::sqrt(3.0);
  double errs[2];
  int idx = 0;
  for (int n : {21, 41}) {
    auto cube = DetectorGeometry::cube_boundary({0, 0, 0}, 1.0, n);
    Grid g = cube.node_grid();
    double dt = 0.4 * g.spacing[0];
    int ns = static_cast<int>(std::ceil(T / dt)) + 1;
    auto data = kirchhoff_pressure(s, cube, ns, dt, 8);
    auto rec = time_reversal(data, ScalarField::constant(g, 1.0));
    errs[idx++] = rel_l2(rec.values(), rasterize_phantom(s, g).values());
  }
  MESSAGE("errors " << errs[0] << " " << errs[1]);
  CHECK(errs[0] >= 3.0 * errs[1]);
}

TEST_CASE("2D variable speed time reversal improves with longer data") {
  const int n = 61;
  auto sq = DetectorGeometry::square_boundary({0, 0, 0}, 1.0, n);
  Grid g = sq.node_grid();
  std::vector<double> cv(g.size());
  for (std::size_t q = 0; q < g.size(); ++q) {
    Point x = g.node(q);
    cv[q] = 1.0 + 0.2 * std::sin(1.3 * x[0] + 0.4) * std::cos(1.1 * x[1]);
  }
  ScalarField c(g, cv);
  CHECK(c.min() >= 0.8);
  CHECK(c.max() <= 1.2);
  PhantomSpec s;
  s.add(Primitive::bump2(0.2, -0.1, 0.4, 1.0));
  auto f = rasterize_phantom(s, g);
  FdConfig cfg;
  cfg.T = 6.0;
  auto d = fd_forward(f, c, sq, cfg);
  int half = static_cast<int>(std::round(3.0 / d.dt())) + 1;
  double e1 = rel_l2(time_reversal(truncate(d, half), c).values(), f.values());
  double e2 = rel_l2(time_reversal(d, c).values(), f.values());
  MESSAGE("errors at T and 2T: " << e1 << " " << e2);
  CHECK(e2 < e1);
}
