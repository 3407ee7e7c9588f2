#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tat/bessel.hpp"
#include "tat/core.hpp"

using namespace tat;

namespace {

// power series J_m(t) = sum (-1)^k (t/2)^{2k+m} / (k! (k+m)!), fine for moderate t
double series_j(int m, double t) {
  double term = std::pow(0.5 * t, m) / std::tgamma(m + 1.0), sum = 0.0;
  for (int k = 0; k < 80; ++k) {
    sum += term;
    term *= -0.25 * t * t / ((k + 1.0) * (k + 1.0 + m));
  }
  return sum;
}

}  // namespace

TEST_CASE("bessel values") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(3, 0.0) == 0.0);
  for (int m : {0, 1, 2, 5, 9})
    for (double t : {0.3, 1.7, 4.2, 8.9}) CHECK(bessel_j(m, t) == doctest::Approx(series_j(m, t)).epsilon(1e-10));
  CHECK_THROWS_AS(bessel_y(0, 0.0), Error);
  CHECK_THROWS_AS(bessel_y(2, -1.0), Error);
}

TEST_CASE("recurrence tables agree with direct evaluation") {
  std::vector<double> js, ys;
  for (double t : {0.05, 0.9, 7.3, 31.0, 250.0, 999.0}) {
    bessel_j_orders(40, t, js);
    bessel_y_orders(12, t, ys);
    for (int m = 0; m <= 40; ++m) {
      double ref = bessel_j(m, t);
      CHECK(std::abs(js[m] - ref) <= 1e-10 * std::max(std::abs(ref), 1e-300) + 1e-15);
    }
    for (int m = 0; m <= 12; ++m) CHECK(ys[m] == doctest::Approx(bessel_y(m, t)).epsilon(1e-9));
  }
  bessel_j_orders(5, -2.0, js);
  CHECK(js[3] == doctest::Approx(-bessel_j(3, 2.0)).epsilon(1e-12));
}

TEST_CASE("wronskian identity") {
  const double t = 5.0;
  const int m = 3;
  // derivatives from the recurrences C_m' = (C_{m-1} - C_{m+1}) / 2
  double jp = 0.5 * (bessel_j(m - 1, t) - bessel_j(m + 1, t));
  double yp = 0.5 * (bessel_y(m - 1, t) - bessel_y(m + 1, t));
  double w = bessel_j(m, t) * yp - jp * bessel_y(m, t);
  CHECK(std::abs(w - 2.0 / (std::numbers::pi * t)) <= 1e-10);
}

TEST_CASE("zeros") {
  auto z0 = bessel_zeros(0, 3);
  CHECK(std::abs(z0[0] - 2.404825557695773) <= 1e-12);
  CHECK(std::abs(series_j(0, z0[0])) <= 1e-12);
  auto table = BesselTable::build(40, 12);
  for (int m = 0; m <= 40; ++m) {
    double prev = 0.0;
    for (int q = 1; q <= 12; ++q) {
      double z = table.zero(m, q);
      CHECK(std::abs(bessel_j(m, z)) <= 1e-10);
      CHECK(z > prev);
      prev = z;
    }
    // no zero skipped: J_m has exactly q sign changes below j_{m,q}
    int changes = 0;
    double last = bessel_j(m, 1e-6 + m * 0.5);
    for (double t = 1e-6 + m * 0.5; t < table.zero(m, 12) - 1e-3; t += 0.01) {
      double v = bessel_j(m, t);
      if ((v < 0) != (last < 0)) ++changes;
      last = v;
    }
    CHECK(changes == 11);
  }
}

TEST_CASE("radial kernels") {
  CHECK(radial_kernel_j(2, 0.0) == 1.0);
  CHECK(radial_kernel_j(3, 0.0) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)));
  CHECK(radial_kernel_j(3, 2.0) == doctest::Approx(bessel_j(0.5, 2.0) / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(radial_kernel_y(3, 2.0) == doctest::Approx(bessel_y(0.5, 2.0) / std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(radial_kernel_y(2, 0.0), Error);
}
