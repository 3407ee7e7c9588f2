// Binary interchange formats and image export.
//
// Field file (little endian):
//   "TATF" u32 version=1, u32 dim, u32 n[dim], f64 origin[dim], f64 spacing[dim],
//   f64 values (row-major, axis 0 slowest)
// Data file (little endian):
//   "TATD" u32 version=1, u8 kind,
//   geometry block: u8 geometry kind, u8 dim, f64 cx, cy, cz, size, angle0, span,
//                   u32 n_detectors, u32 n_aux
//   u32 n_samples, f64 dt, f64 values (detector-major)
#pragma once

#include <string>

#include "tat/core.hpp"
#include "tat/tatdata.hpp"

namespace tat {

inline constexpr std::uint32_t kFormatVersion = 1;

void write_field(const std::string& path, const ScalarField& field);
ScalarField read_field(const std::string& path);
void write_tatdata(const std::string& path, const TatData& data);
TatData read_tatdata(const std::string& path);

std::string encode_field(const ScalarField& field);
ScalarField decode_field(const std::string& bytes);
std::string encode_tatdata(const TatData& data);
TatData decode_tatdata(const std::string& bytes);

/// Linear map min -> 0, max -> 65535 written as ASCII "P2". For 3D fields the
/// slice `slice` along the last axis is exported (middle slice when negative).
/// The scaling constants go to `<path>.scale.csv`.
void export_pgm(const std::string& path, const ScalarField& field, int slice = -1);

}  // namespace tat
