#include "tat/tatdata.hpp"

#include <cmath>

namespace tat {

const char* to_string(DataKind k) {
  switch (k) {
    case DataKind::mean: return "mean";
    case DataKind::integral: return "integral";
    case DataKind::pressure: return "pressure";
  }
  return "?";
}

TatData::TatData(DetectorGeometry geometry, DataKind kind, int n_samples, double dt, std::vector<double> values)
    : geometry_(std::move(geometry)), kind_(kind), n_samples_(n_samples), dt_(dt), values_(std::move(values)) {
  validate();
}

TatData TatData::zeros(DetectorGeometry geometry, DataKind kind, int n_samples, double dt) {
  std::size_t n = geometry.count() * static_cast<std::size_t>(n_samples);
  return TatData(std::move(geometry), kind, n_samples, dt, std::vector<double>(n, 0.0));
}

void TatData::validate() const {
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw Error(ErrorCode::invalid_argument, "sample spacing must be positive");
  if (n_samples_ < 1) throw Error(ErrorCode::invalid_argument, "need at least one sample");
  if (static_cast<std::uint8_t>(kind_) > 2) throw Error(ErrorCode::tag_out_of_range, "data kind out of range");
  if (values_.size() != geometry_.count() * static_cast<std::size_t>(n_samples_))
    throw Error(ErrorCode::validation, "data length does not match detectors x samples");
  for (double v : values_)
    if (!std::isfinite(v)) throw Error(ErrorCode::numeric_failure, "non-finite value in data");
  if (kind_ == DataKind::integral)
    for (std::size_t i = 0; i < geometry_.count(); ++i)
      if (values_[i * n_samples_] != 0.0)
        throw Error(ErrorCode::validation, "integral data must vanish at r = 0 (detector " + std::to_string(i) + ")");
}

}  // namespace tat
