#include "tat/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace tat {

namespace {

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

class Writer {
 public:
  template <typename T>
  void put(T v) {
    v = to_little(v);
    buf_.append(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void raw(const char* s, std::size_t n) { buf_.append(s, n); }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(const std::string& b) : buf_(b) {}
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return to_little(v);
  }
  void magic(const char* m) {
    if (buf_.size() < 4 || std::memcmp(buf_.data(), m, 4) != 0) throw Error(ErrorCode::bad_magic, "bad magic");
    pos_ = 4;
  }
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw Error(ErrorCode::truncated, "truncated payload");
  }
  bool at_end() const { return pos_ == buf_.size(); }

 private:
  const std::string& buf_;
  std::size_t pos_ = 0;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::io, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::io, "cannot write " + path);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::io, "write failed for " + path);
}

void check_version(Reader& r) {
  auto v = r.get<std::uint32_t>();
  if (v != kFormatVersion) throw Error(ErrorCode::tag_out_of_range, "unsupported format version " + std::to_string(v));
}

}  // namespace

std::string encode_field(const ScalarField& field) {
  const Grid& g = field.grid();
  Writer w;
  w.raw("TATF", 4);
  w.put<std::uint32_t>(kFormatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.dim));
  for (int a = 0; a < g.dim; ++a) w.put<std::uint32_t>(static_cast<std::uint32_t>(g.n[a]));
  for (int a = 0; a < g.dim; ++a) w.put<double>(g.origin[a]);
  for (int a = 0; a < g.dim; ++a) w.put<double>(g.spacing[a]);
  for (double v : field.values()) w.put<double>(v);
  return w.take();
}

ScalarField decode_field(const std::string& bytes) {
  Reader r(bytes);
  r.magic("TATF");
  check_version(r);
  Grid g;
  auto dim = r.get<std::uint32_t>();
  if (dim != 2 && dim != 3) throw Error(ErrorCode::tag_out_of_range, "field dimension must be 2 or 3");
  g.dim = static_cast<int>(dim);
  for (int a = 0; a < g.dim; ++a) g.n[a] = static_cast<int>(r.get<std::uint32_t>());
  for (int a = 0; a < g.dim; ++a) g.origin[a] = r.get<double>();
  for (int a = 0; a < g.dim; ++a) g.spacing[a] = r.get<double>();
  g.validate();
  r.need(g.size() * sizeof(double));
  std::vector<double> v(g.size());
  for (auto& x : v) x = r.get<double>();
  return ScalarField(g, std::move(v));
}

std::string encode_tatdata(const TatData& data) {
  const auto& geo = data.geometry();
  Writer w;
  w.raw("TATD", 4);
  w.put<std::uint32_t>(kFormatVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(data.kind()));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(geo.kind()));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(geo.dim()));
  for (int a = 0; a < 3; ++a) w.put<double>(geo.center()[a]);
  w.put<double>(geo.size());
  w.put<double>(geo.angle0());
  w.put<double>(geo.span());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(geo.count()));
  w.put<std::uint32_t>(geo.n_aux());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(data.n_samples()));
  w.put<double>(data.dt());
  for (double v : data.values()) w.put<double>(v);
  return w.take();
}

TatData decode_tatdata(const std::string& bytes) {
  Reader r(bytes);
  r.magic("TATD");
  check_version(r);
  auto kind = r.get<std::uint8_t>();
  if (kind > 2) throw Error(ErrorCode::tag_out_of_range, "data kind tag out of range");
  auto gkind = r.get<std::uint8_t>();
  if (gkind > 5) throw Error(ErrorCode::tag_out_of_range, "geometry kind tag out of range");
  auto dim = r.get<std::uint8_t>();
  if (dim != 2 && dim != 3) throw Error(ErrorCode::tag_out_of_range, "geometry dimension must be 2 or 3");
  Point c;
  for (int a = 0; a < 3; ++a) c[a] = r.get<double>();
  double size = r.get<double>();
  double angle0 = r.get<double>();
  double span = r.get<double>();
  auto n_det = r.get<std::uint32_t>();
  auto n_aux = r.get<std::uint32_t>();
  auto n_samples = r.get<std::uint32_t>();
  double dt = r.get<double>();
  auto geo = DetectorGeometry::from_parameters(static_cast<GeometryKind>(gkind), dim, c, size, angle0, span, n_det,
                                               n_aux);
  if (geo.count() != n_det) throw Error(ErrorCode::validation, "detector count inconsistent with geometry");
  std::size_t n = static_cast<std::size_t>(n_det) * n_samples;
  r.need(n * sizeof(double));
  std::vector<double> v(n);
  for (auto& x : v) x = r.get<double>();
  return TatData(std::move(geo), static_cast<DataKind>(kind), static_cast<int>(n_samples), dt, std::move(v));
}

void write_field(const std::string& path, const ScalarField& field) { spit(path, encode_field(field)); }
ScalarField read_field(const std::string& path) { return decode_field(slurp(path)); }
void write_tatdata(const std::string& path, const TatData& data) { spit(path, encode_tatdata(data)); }
TatData read_tatdata(const std::string& path) { return decode_tatdata(slurp(path)); }

void export_pgm(const std::string& path, const ScalarField& field, int slice) {
  const Grid& g = field.grid();
  int k = 0;
  if (g.dim == 3) {
    k = slice < 0 ? g.n[2] / 2 : slice;
    if (k >= g.n[2]) throw Error(ErrorCode::invalid_argument, "slice index out of range");
  }
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j) {
      double v = field.at(i, j, k);
      if (first || v < lo) lo = v;
      if (first || v > hi) hi = v;
      first = false;
    }
  const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  // rows run along axis 1 (y) from top to bottom, columns along axis 0 (x)
  out << "P2\n" << g.n[0] << ' ' << g.n[1] << "\n65535\n";
  for (int j = g.n[1] - 1; j >= 0; --j) {
    for (int i = 0; i < g.n[0]; ++i) {
      long q = std::lround((field.at(i, j, k) - lo) * scale);
      out << q << (i + 1 < g.n[0] ? ' ' : '\n');
    }
  }
  std::ofstream sc(path + ".scale.csv");
  if (!sc) throw Error(ErrorCode::io, "cannot write scale sidecar");
  sc.precision(17);
  sc << "min,max,scale\n" << lo << ',' << hi << ',' << scale << '\n';
}

}  // namespace tat
