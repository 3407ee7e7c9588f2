#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tat/io.hpp"
#include "tat/phantom.hpp"

using namespace tat;

TEST_CASE("phantom evaluation") {
  SUBCASE("empty spec rasterizes to zero") {
    auto f = rasterize_phantom({}, Grid::centered(2, 9, 2.0));
    CHECK(f.max_abs() == 0.0);
  }
  SUBCASE("disk centre, overlap and exterior") {
    PhantomSpec s;
    s.add(Primitive::disk(0.1, 0.2, 0.3, 1.0));
    CHECK(eval_phantom(s, {0.1, 0.2, 0.0}) == 1.0);
    CHECK(eval_phantom(s, {0.9, 0.2, 0.0}) == 0.0);
    s.add(Primitive::disk(0.2, 0.2, 0.3, 1.0));
    CHECK(eval_phantom(s, {0.15, 0.2, 0.0}) == 2.0);
  }
  SUBCASE("bump centre and rim") {
    PhantomSpec s;
    s.add(Primitive::bump2(0.0, 0.0, 1.0, 2.0));
    CHECK(eval_phantom(s, {0.0, 0.0, 0.0}) == 2.0);
    CHECK(eval_phantom(s, {1.0, 0.0, 0.0}) == 0.0);
    CHECK(eval_phantom(s, {0.5, 0.0, 0.0}) == doctest::Approx(2.0 * 0.75 * 0.75 * 0.75));
  }
  SUBCASE("rect and box") {
    PhantomSpec s;
    s.add(Primitive::box(0, 0, 0, 0.1, 0.2, 0.3, 3.0));
    CHECK(eval_phantom(s, {0.05, -0.15, 0.25}) == 3.0);
    CHECK(eval_phantom(s, {0.05, -0.25, 0.25}) == 0.0);
  }
}

TEST_CASE("rasterization matches pointwise evaluation and is linear") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.6, 0.6), r(0.05, 0.3);
  for (int trial = 0; trial < 5; ++trial) {
    PhantomSpec a, b;
    for (int k = 0; k < 3; ++k) {
      a.add(Primitive::bump2(u(rng), u(rng), r(rng), u(rng)));
      b.add(Primitive::disk(u(rng), u(rng), r(rng), u(rng)));
      b.add(Primitive::rect(u(rng), u(rng), r(rng), r(rng), u(rng)));
    }
    Grid g = Grid::centered(2, 33, 2.0, {0.01, -0.02, 0.0});
    auto fa = rasterize_phantom(a, g), fb = rasterize_phantom(b, g), fab = rasterize_phantom(a.concat(b), g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(fa[i] == eval_phantom(a, g.node(i)));
      CHECK(fab[i] == doctest::Approx(fa[i] + fb[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("rasterization warns on primitives outside the grid") {
  PhantomSpec s;
  s.add(Primitive::disk(0.95, 0.0, 0.2, 1.0));
  std::vector<std::string> warnings;
  auto f = rasterize_phantom(s, Grid::centered(2, 21, 2.0), &warnings);
  CHECK(warnings.size() == 1);
  CHECK(f.max() == 1.0);
}

TEST_CASE("phantom text format") {
  auto s = parse_phantom("# comment\ndisk 0 0.1 0.2 1\nrect 0 0 0.1 0.2 -1 # trailing\n\nbump 0.2 0 0.3 2\n");
  REQUIRE(s.primitives.size() == 3);
  CHECK(s.primitives[1].shape == Shape::rect);
  CHECK(s.primitives[2].amp == 2.0);
  auto again = parse_phantom(format_phantom(s));
  REQUIRE(again.primitives.size() == 3);
  CHECK(again.primitives[1].size[1] == 0.2);
  CHECK_THROWS_AS(parse_phantom("disk 0 0 -1 1\n"), Error);
  CHECK_THROWS_AS(parse_phantom("blob 0 0 1 1\n"), Error);
  CHECK_THROWS_AS(parse_phantom("disk 0 0 1\n"), Error);
  CHECK_THROWS_AS(parse_phantom("disk 0 0 1 1\nball 0 0 0 1 1\n"), Error);
  CHECK(parse_phantom("bump 0 0 0 0.5 1\n").dim() == 3);
}

TEST_CASE("detector geometries lie on their surfaces") {
  using std::numbers::pi;
  std::vector<DetectorGeometry> geos = {
      DetectorGeometry::circle({0.1, -0.2, 0}, 1.3, 257),
      DetectorGeometry::arc({0, 0, 0}, 1.0, pi / 2, pi, 64),
      DetectorGeometry::sphere({0, 0.1, 0.2}, 1.0, 16, 32),
      DetectorGeometry::square_boundary({0, 0, 0}, 0.5, 17),
      DetectorGeometry::cube_boundary({0, 0, 0}, 0.5, 9),
      DetectorGeometry::line_segment({0, 0, 0}, 1.0, 0.3, 11),
  };
  for (const auto& g : geos) {
    CHECK(g.surface_residual() <= 1e-12);
    for (const auto& n : g.normals()) CHECK(norm(n) == doctest::Approx(1.0).epsilon(1e-14));
  }
  double area = 0;
  for (double w : geos[2].weights()) area += w;
  CHECK(area == doctest::Approx(4 * pi).epsilon(1e-12));
  CHECK(geos[3].count() == 4 * 16);
  CHECK(geos[4].count() == 9 * 9 * 9 - 7 * 7 * 7);
  auto lut = geos[4].node_lookup();
  auto grid = geos[4].node_grid();
  for (std::size_t f = 0; f < lut.size(); ++f)
    if (lut[f] >= 0) CHECK(grid.node(f) == geos[4].positions()[lut[f]]);
}

namespace {

std::string tmp(const char* name) { return std::string("/tmp/tat_test_") + name; }

}  // namespace

TEST_CASE("field round trip is bit exact") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int dim : {2, 3}) {
    Grid g = Grid::centered(dim, 5, 1.7, {0.3, 0.1, -0.2});
    std::vector<double> v(g.size());
    for (auto& x : v) x = u(rng) * std::pow(10.0, static_cast<int>(u(rng)) % 200);
    ScalarField f(g, v);
    write_field(tmp("f.field"), f);
    auto back = read_field(tmp("f.field"));
    CHECK(back.grid() == g);
    CHECK(std::memcmp(back.values().data(), f.values().data(), v.size() * sizeof(double)) == 0);
  }
}

TEST_CASE("3x3 field round trip") {
  ScalarField f(Grid::centered(2, 3, 1.0), {1, 2, 3, 4, 5, 6, 7, 8, 9.5});
  auto back = decode_field(encode_field(f));
  for (std::size_t i = 0; i < 9; ++i) CHECK(back[i] == f[i]);
}

TEST_CASE("data round trip is bit exact for every geometry") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  std::vector<DetectorGeometry> geos = {
      DetectorGeometry::circle({0, 0, 0}, 1.0, 12),     DetectorGeometry::arc({0, 0, 0}, 2.0, 1.0, 2.0, 7),
      DetectorGeometry::sphere({0, 0, 0}, 1.0, 3, 6),   DetectorGeometry::square_boundary({0, 0, 0}, 1.0, 5),
      DetectorGeometry::cube_boundary({0, 0, 0}, 1.0, 4), DetectorGeometry::line_segment({0, 0, 0}, 1.0, 0.5, 4),
  };
  for (const auto& g : geos) {
    for (DataKind kind : {DataKind::mean, DataKind::integral, DataKind::pressure}) {
      const int ns = 6;
      std::vector<double> v(g.count() * ns);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = (kind == DataKind::integral && i % ns == 0) ? 0.0 : nd(rng);
      TatData d(g, kind, ns, 0.0123, v);
      auto back = decode_tatdata(encode_tatdata(d));
      CHECK(back.kind() == kind);
      CHECK(back.geometry() == g);
      CHECK(back.dt() == d.dt());
      CHECK(std::memcmp(back.values().data(), v.data(), v.size() * sizeof(double)) == 0);
      CHECK(back.geometry().positions() == g.positions());
    }
  }
}

TEST_CASE("decoding errors carry distinct codes") {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::invalid_argument;
  };
  ScalarField f(Grid::centered(2, 3, 1.0), std::vector<double>(9, 1.0));
  std::string bytes = encode_field(f);
  std::string bad = bytes;
  bad[0] = 'X';
  CHECK(code_of([&] { decode_field(bad); }) == ErrorCode::bad_magic);
  CHECK_THROWS_WITH(decode_field(bad), "bad magic");
  CHECK(code_of([&] { decode_field(bytes.substr(0, bytes.size() - 3)); }) == ErrorCode::truncated);
  std::string baddim = bytes;
  baddim[8] = 7;
  CHECK(code_of([&] { decode_field(baddim); }) == ErrorCode::tag_out_of_range);

  TatData d = TatData::zeros(DetectorGeometry::circle({0, 0, 0}, 1, 4), DataKind::mean, 3, 0.1);
  std::string db = encode_tatdata(d);
  std::string badkind = db;
  badkind[8] = 9;
  CHECK(code_of([&] { decode_tatdata(badkind); }) == ErrorCode::tag_out_of_range);
  // an integral dataset with a nonzero r = 0 column
  std::string integral = db;
  integral[8] = 1;
  double one = 1.0;
  std::memcpy(integral.data() + integral.size() - 12 * sizeof(double), &one, sizeof(double));
  CHECK(code_of([&] { decode_tatdata(integral); }) == ErrorCode::validation);
}

TEST_CASE("pgm export scales linearly and writes a sidecar") {
  ScalarField f(Grid::centered(2, 2, 1.0), {-1.0, 0.0, 1.0, 3.0});
  export_pgm(tmp("img.pgm"), f);
  std::ifstream in(tmp("img.pgm"));
  std::string magic;
  int w, h, maxv;
  in >> magic >> w >> h >> maxv;
  CHECK(magic == "P2");
  CHECK(w == 2);
  CHECK(maxv == 65535);
  std::vector<long> px(4);
  for (auto& p : px) in >> p;
  // top row is j = 1: values f(0,1) = 0, f(1,1) = 3
  CHECK(px[0] == 16384);
  CHECK(px[1] == 65535);
  CHECK(px[2] == 0);
  std::ifstream sc(tmp("img.pgm") + ".scale.csv");
  std::string header, row;
  sc >> header >> row;
  CHECK(header == "min,max,scale");
  CHECK(row.rfind("-1,3,", 0) == 0);
}
