// Range-condition audits, visibility prediction for partial detector sets,
// reconstruction metrics and the odd-phantom uniqueness probes.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tat/phantom.hpp"
#include "tat/tatdata.hpp"

namespace tat {

struct RangeEntry {
  std::string condition;  // "moment" or "orthogonality"
  int k = 0;              // moment order, or angular order m
  int q = 0;              // zero index for orthogonality rows
  double residual = 0.0;
};

struct RangeReport {
  std::vector<RangeEntry> entries;
  /// L2 norm of the data the residuals are relative to
  double normalization = 0.0;
  double tolerance = 1e-2;
  std::vector<std::string> notes;

  double max_residual() const;
  double max_residual(const std::string& condition) const;
  bool pass() const { return max_residual() <= tolerance; }
  void append(const RangeReport& other);
  /// condition,index,residual,tolerance,pass
  void write_csv(std::ostream& os) const;
};

/// Moment conditions: M_k(theta) = sum_j r_j^{2k+1} g(theta, r_j) dr is a
/// trigonometric polynomial of degree <= 2k; the residual is the energy fraction
/// of the angular modes |m| > 2k. Full circle, 2D.
RangeReport moment_check(const TatData& data, int k_max, double tolerance = 1e-2);

/// Bessel orthogonality: the angular coefficients of sum_j g(theta, t_j) J_0(lambda t_j) t_j dt
/// vanish at lambda = j_{m,q} / R. Residual |g_m(j_{m,q}/R)| / ||g||, ||g|| the
/// root-mean-square over detectors of (int g^2 dt)^{1/2}.
RangeReport orthogonality_check(const TatData& data, int m_max, int q_max, double tolerance = 1e-2);

struct VisibilityPoint {
  Point x;
  Point normal;
  bool visible = false;
  int primitive = 0;
};

struct VisibilityMap {
  std::vector<VisibilityPoint> points;
  double visible_fraction() const;
  /// x,y,nx,ny,visible with a leading comment naming the criterion
  void write_csv(std::ostream& os) const;
};

/// A boundary point is visible when the full line through it along its normal
/// meets the detector circle or arc. Disks and rectangles contribute
/// `samples_per_primitive` boundary points each; bumps have no jump set and are skipped.
VisibilityMap visibility_map(const PhantomSpec& spec, const DetectorGeometry& geom, int samples_per_primitive = 512);

/// Full-circle data with every detector outside [angle0, angle0 + span] zeroed.
TatData restrict_to_arc(const TatData& circle_data, double angle0, double span);

struct EdgeSegment {
  std::string label;
  Point a, b;
};

struct EdgeSharpness {
  std::string label;
  double value = 0.0;
  int nodes = 0;
};

struct Metrics {
  double rel_l2 = 0.0;
  double rel_linf = 0.0;
  std::vector<EdgeSharpness> edges;
};

/// rel_l2 = |rec - ref|_2 / |ref|_2, rel_linf likewise; edge sharpness is the mean
/// |grad rec| over nodes within 1.5 cells of each segment (a band 3 cells wide).
Metrics compute_metrics(const ScalarField& ref, const ScalarField& rec, const std::vector<EdgeSegment>& edges = {});

/// The four sides of a rectangle primitive, labelled left/right/bottom/top.
std::vector<EdgeSegment> rect_edges(const Primitive& rect);

/// f - (f reflected about the line through `origin` along `dir`).
PhantomSpec odd_phantom(const PhantomSpec& base, const Point& origin, const Point& dir);
/// Odd about both coordinate axes: f(x, y) - f(-x, y) - f(x, -y) + f(-x, -y).
PhantomSpec coxeter_phantom(const PhantomSpec& base);

/// max |g| / ||f||_2 for spherical-mean data of `spec` on a line-segment geometry,
/// with mirror-symmetric quadrature about the line.
double nonuniqueness_probe(const DetectorGeometry& line, const PhantomSpec& spec, int n_samples = 128,
                           double t_max = 0.0);

}  // namespace tat
