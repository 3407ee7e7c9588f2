// Leapfrog finite differences for p_tt = c^2 Laplacian(p): forward boundary
// traces and time-reversal reconstruction.
#pragma once

#include <string>
#include <vector>

#include "tat/tatdata.hpp"

namespace tat {

struct FdConfig {
  /// c_max * dt / h_min; 0 selects 0.5 in 2D and 0.4 in 3D
  double cfl = 0.0;
  /// padding cells per side for forward runs; negative selects the minimum safe width
  int padding = -1;
  /// final time
  double T = 1.0;

  double cfl_for(int dim) const { return cfl > 0.0 ? cfl : (dim == 2 ? 0.5 : 0.4); }
  void validate(int dim) const;
};

/// Explicit second-order scheme on a fixed grid with zero Dirichlet values on
/// the outer grid boundary (callers may overwrite boundary nodes between steps).
class WaveSolver {
 public:
  WaveSolver(const ScalarField& c, double dt);

  /// p(0) = f, p_t(0) = 0. The previous level is set to the symmetric value so
  /// the first step is p1 = p0 + dt^2 c^2 Lap(p0) / 2.
  void start(std::span<const double> f);
  /// Zero state and zero velocity (time reversal starts here).
  void start_at_rest();
  void step();
  /// Leapfrog backwards: after step(), reverse() swaps the two levels so the
  /// next step() runs in the opposite time direction.
  void reverse() { std::swap(prev_, cur_); }

  const Grid& grid() const { return grid_; }
  double dt() const { return dt_; }
  int steps_taken() const { return n_; }
  std::span<const double> current() const { return cur_; }
  std::span<double> current_mut() { return cur_; }
  ScalarField field() const { return ScalarField(grid_, cur_); }
  /// Discrete energy between the previous and current levels,
  /// 1/2 sum [ c^-2 ((p_n - p_{n-1}) / dt)^2 + sum_axes D+p_n D+p_{n-1} ] h^d,
  /// which the scheme conserves exactly while the boundary stays zero.
  double energy() const;

 private:
  void laplacian_update(const std::vector<double>& p, std::vector<double>& out, double scale) const;

  Grid grid_;
  double dt_;
  std::vector<double> c2dt2_, inv_c2_;
  std::vector<double> prev_, cur_, next_;
  int n_ = 0;
};

/// Largest stable dt for a speed field and CFL number.
double stable_dt(const ScalarField& c, double cfl);

struct FdReport {
  double dt = 0.0;
  int padding = 0;
  /// max |p(T)| inside the detector enclosure, relative to max |f|
  double residual_at_T = 0.0;
  std::vector<std::string> warnings;
};

/// Pressure traces at the detectors for p(0) = f, p_t(0) = 0. f and c share a grid;
/// the grid is padded so reflections from its outer edge cannot reach a detector
/// before T. Detectors off the grid nodes are sampled by multilinear interpolation.
TatData fd_forward(const ScalarField& f, const ScalarField& c, const DetectorGeometry& geom, const FdConfig& cfg,
                   FdReport* report = nullptr);

/// Minimum padding (cells per side) for a forward run to time T.
int required_padding(const ScalarField& c, double T);

/// Runs the wave equation backwards from rest at T with the measured pressure
/// imposed on the square/cube boundary, and returns the field at t = 0 on the
/// boundary's node grid. c must live on that grid. If data.dt violates the CFL
/// bound each sample interval is subdivided and the boundary data interpolated
/// linearly in t.
ScalarField time_reversal(const TatData& data, const ScalarField& c, const FdConfig& cfg = {},
                          std::vector<std::string>* warnings = nullptr);

}  // namespace tat
