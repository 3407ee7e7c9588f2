#include "tat/bessel.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

#include <cmath>
#include <numbers>

#include "tat/core.hpp"

namespace tat {

using std::numbers::pi;

namespace {

struct GslQuiet {
  GslQuiet() { gsl_set_error_handler_off(); }
};
const GslQuiet gsl_quiet;

bool is_integer(double v) { return v == std::floor(v); }

double checked(int status, const gsl_sf_result& r, const char* what) {
  if (status != GSL_SUCCESS && status != GSL_EUNDRFLW)
    throw Error(ErrorCode::numeric_failure, std::string(what) + ": " + gsl_strerror(status));
  return r.val;
}

}  // namespace

double bessel_j(double order, double t) {
  gsl_sf_result r;
  if (is_integer(order)) {
    int m = static_cast<int>(order);
    if (m == 0) return checked(gsl_sf_bessel_J0_e(t, &r), r, "J0");
    if (m == 1) return checked(gsl_sf_bessel_J1_e(t, &r), r, "J1");
    return checked(gsl_sf_bessel_Jn_e(m, t, &r), r, "Jn");
  }
  if (t < 0.0) throw Error(ErrorCode::invalid_argument, "fractional-order J needs t >= 0");
  if (order < 0.0) throw Error(ErrorCode::invalid_argument, "negative fractional order unsupported");
  if (t == 0.0) return 0.0;
  return checked(gsl_sf_bessel_Jnu_e(order, t, &r), r, "Jnu");
}

double bessel_y(double order, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::invalid_argument, "Y_m is undefined for t <= 0");
  gsl_sf_result r;
  if (is_integer(order)) {
    int m = static_cast<int>(order);
    if (m == 0) return checked(gsl_sf_bessel_Y0_e(t, &r), r, "Y0");
    if (m == 1) return checked(gsl_sf_bessel_Y1_e(t, &r), r, "Y1");
    return checked(gsl_sf_bessel_Yn_e(m, t, &r), r, "Yn");
  }
  if (order < 0.0) throw Error(ErrorCode::invalid_argument, "negative fractional order unsupported");
  return checked(gsl_sf_bessel_Ynu_e(order, t, &r), r, "Ynu");
}

void bessel_j_orders(int m_max, double t, std::vector<double>& out) {
  out.assign(m_max + 1, 0.0);
  if (t == 0.0) {
    out[0] = 1.0;
    return;
  }
  const double at = std::abs(t);
  if (at > m_max) {
    // forward recurrence is stable while the order stays below the argument
    out[0] = gsl_sf_bessel_J0(at);
    if (m_max >= 1) out[1] = gsl_sf_bessel_J1(at);
    for (int k = 1; k < m_max; ++k) out[k + 1] = 2.0 * k / at * out[k] - out[k - 1];
  } else {
    // Miller's backward recurrence normalised by J0 + 2 sum J_2k = 1
    int start = 2 * ((m_max + static_cast<int>(at) + 16 + static_cast<int>(std::sqrt(40.0 * (m_max + 1)))) / 2);
    double jp1 = 0.0, j = 1e-300, norm = 0.0;
    for (int k = start; k > 0; --k) {
      double jm1 = 2.0 * k / at * j - jp1;
      jp1 = j;
      j = jm1;
      if (k - 1 <= m_max) out[k - 1] = j;
      if ((k - 1) % 2 == 0) norm += (k - 1 == 0 ? 1.0 : 2.0) * j;
      if (std::abs(j) > 1e250) {
        j *= 1e-250;
        jp1 *= 1e-250;
        norm *= 1e-250;
        for (double& v : out) v *= 1e-250;
      }
    }
    for (double& v : out) v /= norm;
  }
  if (t < 0.0)
    for (int k = 1; k <= m_max; k += 2) out[k] = -out[k];
}

void bessel_y_orders(int m_max, double t, std::vector<double>& out) {
  if (!(t > 0.0)) throw Error(ErrorCode::invalid_argument, "Y_m is undefined for t <= 0");
  out.assign(m_max + 1, 0.0);
  out[0] = gsl_sf_bessel_Y0(t);
  if (m_max >= 1) out[1] = gsl_sf_bessel_Y1(t);
  for (int k = 1; k < m_max; ++k) out[k + 1] = 2.0 * k / t * out[k] - out[k - 1];
}

double mcmahon_zero(int m, int q) {
  const double mu = 4.0 * m * m;
  const double b = (q + 0.5 * m - 0.25) * pi;
  const double e = 8.0 * b;
  return b - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e * e * e) -
         32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * std::pow(e, 5));
}

namespace {

double bisect(int m, double a, double b) {
  double fa = bessel_j(m, a);
  for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
    double c = 0.5 * (a + b);
    double fc = bessel_j(m, c);
    if (fc == 0.0) return c;
    if ((fc < 0) == (fa < 0)) {
      a = c;
      fa = fc;
    } else {
      b = c;
    }
  }
  return 0.5 * (a + b);
}

bool sign_change(int m, double a, double b) { return (bessel_j(m, a) < 0) != (bessel_j(m, b) < 0); }

}  // namespace

std::vector<double> bessel_zeros(int m, int count) {
  if (m < 0 || count < 0) throw Error(ErrorCode::invalid_argument, "bessel_zeros needs m >= 0, count >= 0");
  std::vector<double> zs;
  // zeros of J_m are spaced more than pi apart for m >= 1 and all exceed m
  double lo = m > 0 ? static_cast<double>(m) : 1e-3;
  for (int q = 1; q <= count; ++q) {
    double guess = mcmahon_zero(m, q);
    double a = std::max(lo, guess - 0.25 * pi), b = guess + 0.25 * pi;
    bool ok = b > a && sign_change(m, a, b);
    if (ok) {
      double z = bisect(m, a, b);
      // the bracket must hold the next zero after lo, not a later one
      double probe = lo;
      bool earlier = false;
      while (probe + 0.25 * pi < a) {
        if (sign_change(m, probe, probe + 0.25 * pi)) {
          earlier = true;
          break;
        }
        probe += 0.25 * pi;
      }
      if (!earlier && !sign_change(m, probe, a)) {
        zs.push_back(z);
        lo = z + 1e-9;
        continue;
      }
    }
    // McMahon is poor for small q and large m: scan forward from the previous zero
    double s = lo, step = 0.125 * pi;
    while (!sign_change(m, s, s + step)) s += step;
    double z = bisect(m, s, s + step);
    zs.push_back(z);
    lo = z + 1e-9;
  }
  return zs;
}

BesselTable BesselTable::build(int m_max, int q_max) {
  BesselTable t;
  t.m_max = m_max;
  t.q_max = q_max;
  for (int m = 0; m <= m_max; ++m) t.zeros.push_back(bessel_zeros(m, q_max));
  return t;
}

double radial_kernel_j(int n, double t) {
  if (n == 2) return gsl_sf_bessel_J0(t);
  if (n == 3) {
    // J_{1/2}(t) / t^{1/2} = sqrt(2/pi) sin(t) / t
    const double c = std::sqrt(2.0 / pi);
    if (std::abs(t) < 1e-4) return c * (1.0 - t * t / 6.0);
    return c * std::sin(t) / t;
  }
  throw Error(ErrorCode::invalid_argument, "radial kernels exist for n = 2 or 3");
}

double radial_kernel_y(int n, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::invalid_argument, "Y kernel is undefined for t <= 0");
  if (n == 2) return gsl_sf_bessel_Y0(t);
  if (n == 3) return -std::sqrt(2.0 / pi) * std::cos(t) / t;
  throw Error(ErrorCode::invalid_argument, "radial kernels exist for n = 2 or 3");
}

}  // namespace tat
