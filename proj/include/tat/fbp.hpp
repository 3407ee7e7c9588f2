// Filtered backprojection for detectors on a full circle (2D) or sphere (3D).
#pragma once

#include <string>
#include <vector>

#include "tat/tatdata.hpp"

namespace tat {

enum class FbpVariant {
  fpr3d_laplacian,
  fpr3d_d2t,
  fpr3d_ddt_chain,
  finch2d_laplacian,
  finch2d_filtered,
  kunyansky_general,
  kunyansky_2d,
  kunyansky_3d,
};

const char* to_string(FbpVariant v);
FbpVariant parse_fbp_variant(const std::string& name);
/// 2 or 3; kunyansky_general accepts either and reports 0.
int variant_dim(FbpVariant v);

struct FbpOptions {
  /// kunyansky_general lambda grid; 0 selects pi / dt and pi / (2 t_max)
  double lambda_max = 0.0;
  double dlambda = 0.0;
};

/// Filtered data h(y_i, s_k) on the radius grid s_k = s0 + k * ds, detector-major.
struct FilterProfile {
  double s0 = 0.0;
  double ds = 1.0;
  int n = 0;
  std::vector<double> values;

  double at(std::size_t detector, double s) const;
};

/// The variant's filtration step applied to spherical-integral data.
FilterProfile fbp_filter_profile(FbpVariant v, const TatData& data, const FbpOptions& opt = {});

/// Reconstruct f on `grid` from spherical integrals over circles/spheres centred
/// on a full circle or sphere of detectors. Nodes outside the detector ball are
/// set to 0.
ScalarField fbp_invert(const TatData& data, const Grid& grid, FbpVariant v, const FbpOptions& opt = {},
                       std::vector<std::string>* warnings = nullptr);

}  // namespace tat
