#include "tat/analysis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>

#include "tat/bessel.hpp"
#include "tat/forward.hpp"

namespace tat {

using std::numbers::pi;
using cplx = std::complex<double>;

double RangeReport::max_residual() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.residual);
  return m;
}

double RangeReport::max_residual(const std::string& condition) const {
  double m = 0.0;
  for (const auto& e : entries)
    if (e.condition == condition) m = std::max(m, e.residual);
  return m;
}

void RangeReport::append(const RangeReport& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
  notes.insert(notes.end(), other.notes.begin(), other.notes.end());
  normalization = std::max(normalization, other.normalization);
}

void RangeReport::write_csv(std::ostream& os) const {
  for (const auto& n : notes) os << "# " << n << '\n';
  os << "condition,index,residual,tolerance,pass\n";
  os.precision(10);
  for (const auto& e : entries) {
    os << e.condition << ',';
    if (e.condition == "orthogonality") os << e.k << ':' << e.q;
    else os << e.k;
    os << ',' << e.residual << ',' << tolerance << ',' << (e.residual <= tolerance ? "pass" : "fail") << '\n';
  }
}

namespace {

TatData mean_circle_data(const TatData& data, std::vector<std::string>& notes) {
  const auto& geom = data.geometry();
  if (geom.kind() == GeometryKind::arc)
    throw Error(ErrorCode::unsupported_geometry, "range checks need a full circle of detectors, not an arc");
  if (geom.kind() != GeometryKind::circle)
    throw Error(ErrorCode::unsupported_geometry,
                std::string("range checks need a circle of detectors, got ") + to_string(geom.kind()));
  if (data.kind() == DataKind::pressure)
    throw Error(ErrorCode::unsupported_conversion, "range checks need circular means, not pressure");
  if (data.kind() == DataKind::mean) return data;
  notes.push_back("integral data converted to circular means");
  return convert_kind(data, DataKind::mean);
}

// angular DFT coefficients c_m = 1/N sum_i v_i e^{-i m theta_i}, theta_i = angle0 + 2 pi i / N
std::vector<cplx> angular_dft(const std::vector<double>& v, double angle0) {
  const int n = static_cast<int>(v.size());
  std::vector<cplx> in(v.begin(), v.end()), out(n);
  fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                 reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(p);
  fftw_destroy_plan(p);
  for (int m = 0; m < n; ++m) {
    int mm = m <= n / 2 ? m : m - n;
    out[m] *= std::polar(1.0 / n, -mm * angle0);
  }
  return out;
}

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * pi);
  return a < 0.0 ? a + 2.0 * pi : a;
}

bool on_arc(double theta, double angle0, double span) {
  const double tol = 1e-9;
  double d = wrap_angle(theta - angle0);
  return d <= span + tol || d >= 2.0 * pi - tol;
}

}  // namespace

RangeReport moment_check(const TatData& data, int k_max, double tolerance) {
  if (k_max < 0) throw Error(ErrorCode::invalid_argument, "k_max must be non-negative");
  RangeReport rep;
  rep.tolerance = tolerance;
  TatData g = mean_circle_data(data, rep.notes);
  const int nd = static_cast<int>(g.n_detectors());
  const int nt = g.n_samples();
  const double dt = g.dt();
  rep.normalization = l2_norm(g.values());
  for (int k = 0; k <= k_max; ++k) {
    std::vector<double> M(nd, 0.0);
    for (int i = 0; i < nd; ++i) {
      auto row = g.row(i);
      double s = 0.0;
      for (int j = 1; j < nt; ++j) s += (j == nt - 1 ? 0.5 : 1.0) * std::pow(j * dt, 2 * k + 1) * row[j];
      M[i] = s * dt;
    }
    auto c = angular_dft(M, g.geometry().angle0());
    double total = 0.0, high = 0.0;
    for (int m = 0; m < nd; ++m) {
      int mm = m <= nd / 2 ? m : nd - m;
      double e = std::norm(c[m]);
      total += e;
      if (mm > 2 * k) high += e;
    }
    rep.entries.push_back({"moment", k, 0, total > 0.0 ? high / total : 0.0});
  }
  return rep;
}

RangeReport orthogonality_check(const TatData& data, int m_max, int q_max, double tolerance) {
  RangeReport rep;
  rep.tolerance = tolerance;
  TatData g = mean_circle_data(data, rep.notes);
  const int nd = static_cast<int>(g.n_detectors());
  if (m_max < 0 || q_max < 1) throw Error(ErrorCode::invalid_argument, "need m_max >= 0 and q_max >= 1");
  if (m_max >= (nd + 1) / 2)
    throw Error(ErrorCode::invalid_argument, "m_max exceeds the angular Nyquist limit of the detector circle");
  const double R = g.geometry().size();
  if (R != 1.0) rep.notes.push_back("radius " + std::to_string(R) + " rescaled to 1");
  const int nt = g.n_samples();
  const double dt = g.dt() / R;  // unit-circle variables

  double norm2 = 0.0;
  for (double v : g.values()) norm2 += v * v;
  const double gnorm = std::sqrt(norm2 * dt / nd);
  rep.normalization = gnorm;

  BesselTable zeros = BesselTable::build(m_max, q_max);
  const double angle0 = g.geometry().angle0();
  rep.entries.resize(static_cast<std::size_t>(m_max + 1) * q_max);
#pragma omp parallel for schedule(dynamic) collapse(2)
  for (int m = 0; m <= m_max; ++m)
    for (int q = 1; q <= q_max; ++q) {
      const double lam = zeros.zero(m, q);
      std::vector<double> kern(nt);
      for (int j = 0; j < nt; ++j) kern[j] = (j == nt - 1 ? 0.5 : 1.0) * bessel_j(0, lam * j * dt) * j * dt * dt;
      cplx acc = 0.0;
      for (int i = 0; i < nd; ++i) {
        auto row = g.row(i);
        double s = 0.0;
        for (int j = 0; j < nt; ++j) s += kern[j] * row[j];
        acc += s * std::polar(1.0, -m * (angle0 + 2.0 * pi * i / nd));
      }
      double r = gnorm > 0.0 ? std::abs(acc / static_cast<double>(nd)) / gnorm : 0.0;
      rep.entries[static_cast<std::size_t>(m) * q_max + (q - 1)] = {"orthogonality", m, q, r};
    }
  return rep;
}

double VisibilityMap::visible_fraction() const {
  if (points.empty()) return 0.0;
  std::size_t v = 0;
  for (const auto& p : points) v += p.visible;
  return static_cast<double>(v) / points.size();
}

void VisibilityMap::write_csv(std::ostream& os) const {
  os << "# visibility: geometric normal-line criterion (heuristic)\n";
  os << "x,y,nx,ny,visible\n";
  os.precision(10);
  for (const auto& p : points)
    os << p.x[0] << ',' << p.x[1] << ',' << p.normal[0] << ',' << p.normal[1] << ',' << (p.visible ? 1 : 0) << '\n';
}

VisibilityMap visibility_map(const PhantomSpec& spec, const DetectorGeometry& geom, int samples) {
  if (geom.kind() != GeometryKind::circle && geom.kind() != GeometryKind::arc)
    throw Error(ErrorCode::unsupported_geometry, "visibility is defined for circle and arc detectors");
  if (samples < 4) throw Error(ErrorCode::invalid_argument, "need at least 4 boundary samples per primitive");
  const Point c = geom.center();
  const double R = geom.size();
  const bool full = geom.kind() == GeometryKind::circle;

  auto visible = [&](const Point& x, const Point& n) {
    const double wx = x[0] - c[0], wy = x[1] - c[1];
    const double b = n[0] * wx + n[1] * wy;
    const double disc = b * b - (wx * wx + wy * wy - R * R);
    if (disc < 0.0) return false;
    if (full) return true;
    for (double sg : {-1.0, 1.0}) {
      double s = -b + sg * std::sqrt(disc);
      if (on_arc(std::atan2(wy + s * n[1], wx + s * n[0]), geom.angle0(), geom.span())) return true;
    }
    return false;
  };

  VisibilityMap map;
  int idx = 0;
  for (const auto& p : spec.primitives) {
    if (p.dim != 2) throw Error(ErrorCode::dimension_mismatch, "visibility maps are two-dimensional");
    if (p.shape == Shape::disk) {
      for (int i = 0; i < samples; ++i) {
        double a = 2.0 * pi * i / samples;
        Point n{std::cos(a), std::sin(a), 0.0};
        Point x{p.center[0] + p.size[0] * n[0], p.center[1] + p.size[0] * n[1], 0.0};
        map.points.push_back({x, n, visible(x, n), idx});
      }
    } else if (p.shape == Shape::rect) {
      const int per = std::max(1, samples / 4);
      const Point normals[4] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}};
      for (const auto& n : normals)
        for (int i = 0; i < per; ++i) {
          double u = -1.0 + 2.0 * (i + 0.5) / per;
          Point x = p.center;
          if (n[0] != 0.0) {
            x[0] += n[0] * p.size[0];
            x[1] += u * p.size[1];
          } else {
            x[1] += n[1] * p.size[1];
            x[0] += u * p.size[0];
          }
          map.points.push_back({x, n, visible(x, n), idx});
        }
    }
    ++idx;
  }
  return map;
}

TatData restrict_to_arc(const TatData& data, double angle0, double span) {
  const auto& geom = data.geometry();
  if (geom.kind() != GeometryKind::circle)
    throw Error(ErrorCode::unsupported_geometry, "arc restriction needs full-circle data");
  const int nd = static_cast<int>(data.n_detectors());
  const int nt = data.n_samples();
  std::vector<double> v(data.values().begin(), data.values().end());
  for (int i = 0; i < nd; ++i)
    if (!on_arc(geom.angle0() + 2.0 * pi * i / nd, angle0, span))
      std::fill(v.begin() + static_cast<std::ptrdiff_t>(i) * nt, v.begin() + static_cast<std::ptrdiff_t>(i + 1) * nt,
                0.0);
  return TatData(geom, data.kind(), nt, data.dt(), std::move(v));
}

namespace {

double grad_norm(const ScalarField& f, std::size_t q) {
  const Grid& g = f.grid();
  auto ijk = g.unflatten(q);
  double s = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    auto lo = ijk, hi = ijk;
    if (ijk[a] > 0) --lo[a];
    if (ijk[a] + 1 < g.n[a]) ++hi[a];
    if (lo[a] == hi[a]) continue;
    double d = (f.at(hi[0], hi[1], hi[2]) - f.at(lo[0], lo[1], lo[2])) / ((hi[a] - lo[a]) * g.spacing[a]);
    s += d * d;
  }
  return std::sqrt(s);
}

double segment_distance(const Point& x, const EdgeSegment& e, int dim) {
  Point d{}, w{};
  for (int a = 0; a < dim; ++a) {
    d[a] = e.b[a] - e.a[a];
    w[a] = x[a] - e.a[a];
  }
  double len2 = dot(d, d, dim);
  double t = len2 > 0.0 ? std::clamp(dot(w, d, dim) / len2, 0.0, 1.0) : 0.0;
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += (w[a] - t * d[a]) * (w[a] - t * d[a]);
  return std::sqrt(s);
}

}  // namespace

Metrics compute_metrics(const ScalarField& ref, const ScalarField& rec, const std::vector<EdgeSegment>& edges) {
  if (!(ref.grid() == rec.grid()))
    throw Error(ErrorCode::dimension_mismatch, "reference and reconstruction live on different grids");
  Metrics m;
  double num = 0.0, den = 0.0, dmax = 0.0, rmax = 0.0;
  for (std::size_t q = 0; q < ref.size(); ++q) {
    double d = rec[q] - ref[q];
    num += d * d;
    den += ref[q] * ref[q];
    dmax = std::max(dmax, std::abs(d));
    rmax = std::max(rmax, std::abs(ref[q]));
  }
  auto ratio = [](double a, double b) {
    if (b > 0.0) return a / b;
    return a == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  };
  m.rel_l2 = ratio(std::sqrt(num), std::sqrt(den));
  m.rel_linf = ratio(dmax, rmax);
  const Grid& g = rec.grid();
  double h = 0.0;
  for (int a = 0; a < g.dim; ++a) h = std::max(h, g.spacing[a]);
  for (const auto& e : edges) {
    EdgeSharpness s{e.label, 0.0, 0};
    for (std::size_t q = 0; q < g.size(); ++q)
      if (segment_distance(g.node(q), e, g.dim) <= 1.5 * h) {
        s.value += grad_norm(rec, q);
        ++s.nodes;
      }
    if (s.nodes > 0) s.value /= s.nodes;
    m.edges.push_back(s);
  }
  return m;
}

std::vector<EdgeSegment> rect_edges(const Primitive& r) {
  if (r.shape != Shape::rect) throw Error(ErrorCode::invalid_argument, "rect_edges needs a rectangle primitive");
  const double x0 = r.center[0] - r.size[0], x1 = r.center[0] + r.size[0];
  const double y0 = r.center[1] - r.size[1], y1 = r.center[1] + r.size[1];
  return {{"left", {x0, y0, 0}, {x0, y1, 0}},
          {"right", {x1, y0, 0}, {x1, y1, 0}},
          {"bottom", {x0, y0, 0}, {x1, y0, 0}},
          {"top", {x0, y1, 0}, {x1, y1, 0}}};
}

PhantomSpec odd_phantom(const PhantomSpec& base, const Point& origin, const Point& dir) {
  double n = std::hypot(dir[0], dir[1]);
  if (!(n > 0.0)) throw Error(ErrorCode::invalid_argument, "reflection direction must be non-zero");
  Point u{dir[0] / n, dir[1] / n, 0.0};
  for (const auto& p : base.primitives)
    if (p.shape == Shape::rect && std::abs(u[0] * u[1]) > 1e-12)
      throw Error(ErrorCode::invalid_argument, "rectangles can only be mirrored about axis-parallel lines");
  return base.concat(base.reflected(origin, u).scaled(-1.0));
}

PhantomSpec coxeter_phantom(const PhantomSpec& base) {
  PhantomSpec odd_x = odd_phantom(base, {0, 0, 0}, {0, 1, 0});
  return odd_phantom(odd_x, {0, 0, 0}, {1, 0, 0});
}

double nonuniqueness_probe(const DetectorGeometry& line, const PhantomSpec& spec, int n_samples, double t_max) {
  if (line.kind() != GeometryKind::line_segment)
    throw Error(ErrorCode::unsupported_geometry, "the uniqueness probe needs a line-segment detector set");
  if (spec.dim() != 2) throw Error(ErrorCode::dimension_mismatch, "the uniqueness probe is two-dimensional");
  double reach = 0.0, lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
  for (const auto& p : spec.primitives) {
    double br = p.bounding_radius();
    for (const auto& y : line.positions()) reach = std::max(reach, distance(y, p.center, 2) + br);
    for (int a = 0; a < 2; ++a) {
      lo[a] = std::min(lo[a], p.center[a] - br);
      hi[a] = std::max(hi[a], p.center[a] + br);
    }
  }
  if (t_max <= 0.0) t_max = reach;
  QuadratureSpec quad;
  quad.n_angular = 1024;
  TatData g = spherical_forward(spec, line, n_samples, t_max / (n_samples - 1), DataKind::mean, quad);
  double gmax = 0.0;
  for (double v : g.values()) gmax = std::max(gmax, std::abs(v));
  // ||f||_2 on a 512^2 grid over the bounding box
  double ext = std::max(hi[0] - lo[0], hi[1] - lo[1]);
  Grid grid = Grid::centered(2, 512, ext, {0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.0});
  auto f = rasterize_phantom(spec, grid);
  double fn = l2_norm(f.values()) * grid.spacing[0];
  if (!(fn > 0.0)) throw Error(ErrorCode::invalid_argument, "phantom has zero norm");
  return gmax / fn;
}

}  // namespace tat
