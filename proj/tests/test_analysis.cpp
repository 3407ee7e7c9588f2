#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "tat/analysis.hpp"
#include "tat/fbp.hpp"
#include "tat/forward.hpp"

using namespace tat;

namespace {

QuadratureSpec closed_form() {
  QuadratureSpec q;
  q.mode = QuadratureMode::closed_form;
  return q;
}

TatData circle_means(const PhantomSpec& s, int n_det, int n_t, double R = 1.0) {
  return spherical_forward(s, DetectorGeometry::circle({0, 0, 0}, R, n_det), n_t, 2.0 * R / (n_t - 1),
                           DataKind::mean, closed_form());
}

PhantomSpec interior_bumps() {
  PhantomSpec s;
  s.add(Primitive::bump2(0.2, -0.1, 0.35, 1.0));
  s.add(Primitive::bump2(-0.3, 0.35, 0.2, 0.6));
  return s;
}

TatData add_noise(const TatData& d, double level, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  double rms = l2_norm(d.values()) / std::sqrt(static_cast<double>(d.values().size()));
  std::vector<double> v(d.values().begin(), d.values().end());
  for (double& x : v) x += level * rms * n01(rng);
  return TatData(d.geometry(), d.kind(), d.n_samples(), d.dt(), std::move(v));
}

}  // namespace

TEST_CASE("moment conditions") {
  auto clean = circle_means(interior_bumps(), 512, 256);
  auto rep = moment_check(clean, 3);
  REQUIRE(rep.entries.size() == 4);
  for (const auto& e : rep.entries) CHECK(e.residual <= 1e-3);
  CHECK(rep.pass());

  // white noise of the same norm spreads over every angular mode
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  std::vector<double> v(clean.values().size());
  for (double& x : v) x = n01(rng);
  double s = l2_norm(clean.values()) / l2_norm(v);
  for (double& x : v) x *= s;
  auto noise = TatData(clean.geometry(), DataKind::mean, clean.n_samples(), clean.dt(), v);
  CHECK(moment_check(noise, 0).entries[0].residual >= 0.3);

  PhantomSpec centred;
  centred.add(Primitive::bump2(0.0, 0.0, 0.5, 1.0));
  auto sym = moment_check(circle_means(centred, 128, 128), 3);
  for (const auto& e : sym.entries) CHECK(e.residual <= 1e-10);

  // integral data are accepted with a note
  auto rep2 = moment_check(convert_kind(clean, DataKind::integral), 1);
  CHECK(!rep2.notes.empty());
}

TEST_CASE("Bessel orthogonality conditions") {
  auto clean = circle_means(interior_bumps(), 256, 512);
  auto rep = orthogonality_check(clean, 16, 10);
  REQUIRE(rep.entries.size() == 17 * 10);
  double c = rep.max_residual();
  MESSAGE("clean max residual " << c);
  CHECK(c <= 1e-2);
  double n = orthogonality_check(add_noise(clean, 0.1, 11), 16, 10).max_residual();
  CHECK(n >= 10.0 * c);

  PhantomSpec centred;
  centred.add(Primitive::bump2(0.0, 0.0, 0.5, 1.0));
  auto sym = orthogonality_check(circle_means(centred, 128, 256), 8, 5);
  for (const auto& e : sym.entries)
    if (e.k != 0) CHECK(e.residual <= 1e-12);

  // radius 2 is rescaled exactly: a scaled copy gives the same residuals
  auto big = orthogonality_check(circle_means(interior_bumps().scaled(1.0), 256, 512, 1.0), 4, 4);
  PhantomSpec dbl;
  for (auto p : interior_bumps().primitives) {
    p.center[0] *= 2.0;
    p.center[1] *= 2.0;
    p.size[0] *= 2.0;
    dbl.add(p);
  }
  auto scaled = orthogonality_check(circle_means(dbl, 256, 512, 2.0), 4, 4);
  for (std::size_t i = 0; i < big.entries.size(); ++i)
    CHECK(scaled.entries[i].residual == doctest::Approx(big.entries[i].residual).epsilon(1e-6));
}

TEST_CASE("range residuals converge and are rotation invariant") {
  auto s = interior_bumps();
  double a = orthogonality_check(circle_means(s, 256, 128), 8, 6).max_residual();
  double b = orthogonality_check(circle_means(s, 256, 256), 8, 6).max_residual();
  MESSAGE("orthogonality residual " << a << " -> " << b);
  CHECK(a >= 3.0 * b);

  // rotating the phantom by 5 detector spacings relabels the detectors
  const double rot = 2.0 * M_PI * 5 / 128;
  PhantomSpec r;
  for (auto p : s.primitives) {
    double x = p.center[0], y = p.center[1];
    p.center[0] = std::cos(rot) * x - std::sin(rot) * y;
    p.center[1] = std::sin(rot) * x + std::cos(rot) * y;
    r.add(p);
  }
  auto m0 = moment_check(circle_means(s, 128, 128), 3), m1 = moment_check(circle_means(r, 128, 128), 3);
  for (std::size_t i = 0; i < m0.entries.size(); ++i)
    CHECK(m1.entries[i].residual == doctest::Approx(m0.entries[i].residual).epsilon(1e-6));
  auto o0 = orthogonality_check(circle_means(s, 128, 128), 6, 4);
  auto o1 = orthogonality_check(circle_means(r, 128, 128), 6, 4);
  for (std::size_t i = 0; i < o0.entries.size(); ++i)
    CHECK(o1.entries[i].residual == doctest::Approx(o0.entries[i].residual).epsilon(1e-6));
}

TEST_CASE("range report CSV") {
  RangeReport rep;
  rep.tolerance = 0.01;
  rep.entries.push_back({"moment", 2, 0, 0.5});
  rep.entries.push_back({"orthogonality", 3, 4, 0.001});
  std::ostringstream os;
  rep.write_csv(os);
  CHECK(os.str() == "condition,index,residual,tolerance,pass\nmoment,2,0.5,0.01,fail\northogonality,3:4,0.001,0.01,pass\n");
  CHECK(!rep.pass());
  auto arc = DetectorGeometry::arc({0, 0, 0}, 1.0, 0.0, M_PI, 16);
  CHECK_THROWS_AS(moment_check(TatData::zeros(arc, DataKind::mean, 16, 0.1), 1), Error);
}

TEST_CASE("visibility") {
  PhantomSpec s;
  s.add(Primitive::disk(0.3, 0.0, 0.2, 1.0));
  auto full = visibility_map(s, DetectorGeometry::circle({0, 0, 0}, 1.0, 64));
  REQUIRE(full.points.size() == 512);
  CHECK(full.visible_fraction() == 1.0);

  // left half circle: the normal lines of the top and bottom points stay at x = 0.3
  auto half = visibility_map(s, DetectorGeometry::arc({0, 0, 0}, 1.0, M_PI / 2, M_PI, 64));
  CHECK(half.points[0].visible);      // normal (1, 0)
  CHECK(half.points[256].visible);    // normal (-1, 0)
  CHECK(!half.points[128].visible);   // normal (0, 1)
  CHECK(!half.points[384].visible);   // normal (0, -1)
  CHECK(half.visible_fraction() > 0.1);
  CHECK(half.visible_fraction() < 0.9);
  for (int i = 0; i < 256; ++i) CHECK(half.points[i].visible == half.points[i + 256].visible);

  // simultaneous rotation of phantom and arc
  const double rot = 0.7;
  PhantomSpec sr;
  sr.add(Primitive::disk(0.3 * std::cos(rot), 0.3 * std::sin(rot), 0.2, 1.0));
  auto rotated = visibility_map(sr, DetectorGeometry::arc({0, 0, 0}, 1.0, M_PI / 2 + rot, M_PI, 64));
  int differ = 0;
  for (int i = 0; i < 512; ++i) {
    // point i of the rotated disk sits at angle 2 pi i / 512, i.e. original angle minus rot
    double a = 2.0 * M_PI * i / 512 - rot;
    int j = static_cast<int>(std::lround(a / (2.0 * M_PI) * 512 + 512)) % 512;
    if (std::abs(a / (2.0 * M_PI) * 512 + 512 - std::lround(a / (2.0 * M_PI) * 512 + 512)) < 0.2)
      differ += rotated.points[i].visible != half.points[j].visible;
  }
  CHECK(differ <= 2);

  // an arc shrunk to the point (-1, 0) sees only the points whose normal line passes through it
  auto point = visibility_map(s, DetectorGeometry::arc({0, 0, 0}, 1.0, M_PI, 0.0, 1));
  int vis = 0;
  for (const auto& p : point.points) vis += p.visible;
  CHECK(vis == 2);
  CHECK(point.points[0].visible);
  CHECK(point.points[256].visible);

  std::ostringstream os;
  half.write_csv(os);
  CHECK(os.str().find("heuristic") != std::string::npos);
}

TEST_CASE("metrics") {
  Grid g = Grid::centered(2, 41, 2.0);
  std::vector<double> ramp(g.size());
  for (std::size_t q = 0; q < g.size(); ++q) ramp[q] = 3.0 * g.node(q)[0] + 1.0;
  ScalarField ref(g, ramp);
  auto m0 = compute_metrics(ref, ref);
  CHECK(m0.rel_l2 == 0.0);
  CHECK(m0.rel_linf == 0.0);
  auto m1 = compute_metrics(ref, ScalarField::zeros(g));
  CHECK(m1.rel_l2 == doctest::Approx(1.0));
  CHECK(m1.rel_linf == doctest::Approx(1.0));
  auto m2 = compute_metrics(ref, ref, rect_edges(Primitive::rect(0.0, 0.0, 0.5, 0.5, 1.0)));
  REQUIRE(m2.edges.size() == 4);
  for (const auto& e : m2.edges) {
    CHECK(e.nodes > 0);
    CHECK(e.value == doctest::Approx(3.0));
  }
  CHECK_THROWS_AS(compute_metrics(ref, ScalarField::zeros(Grid::centered(2, 40, 2.0))), Error);
}

TEST_CASE("odd phantoms are invisible to line detectors") {
  PhantomSpec base;
  base.add(Primitive::bump2(0.25, 0.45, 0.3, 1.0));
  base.add(Primitive::disk(-0.4, 0.3, 0.15, 0.5));
  const double ang = 0.3;
  auto line = DetectorGeometry::line_segment({0, 0, 0}, 1.5, ang, 33);
  Point dir{std::cos(ang), std::sin(ang), 0.0};
  auto odd = odd_phantom(base, {0, 0, 0}, dir);
  CHECK(nonuniqueness_probe(line, odd) <= 1e-10);
  auto even = base.concat(base.reflected({0, 0, 0}, dir));
  CHECK(nonuniqueness_probe(line, even) >= 0.1);

  auto cox = coxeter_phantom(base);
  CHECK(nonuniqueness_probe(DetectorGeometry::line_segment({0, 0, 0}, 1.5, 0.0, 33), cox) <= 1e-10);
  CHECK(nonuniqueness_probe(DetectorGeometry::line_segment({0, 0, 0}, 1.5, M_PI / 2, 33), cox) <= 1e-10);
  // a single odd symmetry is not enough for the second line
  CHECK(nonuniqueness_probe(DetectorGeometry::line_segment({0, 0, 0}, 1.5, M_PI / 2, 33),
                            odd_phantom(base, {0, 0, 0}, {1, 0, 0})) >= 0.01);
}

TEST_CASE("limited view blurs the invisible edges") {
  auto sq = Primitive::rect(0.25, 0.0, 0.2, 0.2, 1.0);
  PhantomSpec s;
  s.add(sq);
  QuadratureSpec q;
  q.n_angular = 2048;
  auto data = spherical_forward(s, DetectorGeometry::circle({0, 0, 0}, 1.0, 256), 512, 2.0 / 511,
                                DataKind::integral, q);
  Grid grid = Grid::centered(2, 128, 1.4);
  auto rec = fbp_invert(restrict_to_arc(data, M_PI / 2, M_PI), grid, FbpVariant::kunyansky_2d);
  auto m = compute_metrics(rasterize_phantom(s, grid), rec, rect_edges(sq));
  double visible = 0.5 * (m.edges[0].value + m.edges[1].value);
  double invisible = 0.5 * (m.edges[2].value + m.edges[3].value);
  MESSAGE("sharpness visible " << visible << ", invisible " << invisible);
  CHECK(invisible / visible <= 0.5);

  auto vis = visibility_map(s, DetectorGeometry::arc({0, 0, 0}, 1.0, M_PI / 2, M_PI, 64));
  for (const auto& p : vis.points) CHECK(p.visible == (p.normal[0] != 0.0));
}
