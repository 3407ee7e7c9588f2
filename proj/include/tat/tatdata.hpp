// Detector-by-sample measurement arrays.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tat/geometry.hpp"

namespace tat {

enum class DataKind : std::uint8_t { mean = 0, integral = 1, pressure = 2 };

const char* to_string(DataKind k);

/// g(y_i, t_j) for detectors y_i of a geometry and samples t_j = j * dt.
/// Units have unit sound speed, so radius and time coincide.
class TatData {
 public:
  TatData() = default;
  TatData(DetectorGeometry geometry, DataKind kind, int n_samples, double dt, std::vector<double> values);
  static TatData zeros(DetectorGeometry geometry, DataKind kind, int n_samples, double dt);

  const DetectorGeometry& geometry() const { return geometry_; }
  DataKind kind() const { return kind_; }
  int n_samples() const { return n_samples_; }
  double dt() const { return dt_; }
  std::size_t n_detectors() const { return geometry_.count(); }
  double t(int j) const { return j * dt_; }
  double t_max() const { return (n_samples_ - 1) * dt_; }
  int dim() const { return geometry_.dim(); }

  std::span<const double> values() const { return values_; }
  std::span<const double> row(std::size_t detector) const {
    return std::span<const double>(values_).subspan(detector * n_samples_, n_samples_);
  }
  double at(std::size_t detector, int sample) const { return values_[detector * n_samples_ + sample]; }

  /// Enforces the invariants: dt > 0, finite values, and a zero r = 0 column for integral data.
  void validate() const;

 private:
  DetectorGeometry geometry_;
  DataKind kind_ = DataKind::mean;
  int n_samples_ = 0;
  double dt_ = 1.0;
  std::vector<double> values_;
};

}  // namespace tat
