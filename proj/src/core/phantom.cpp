#include "tat/phantom.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace tat {

Primitive Primitive::disk(double cx, double cy, double r, double amp) {
  return {Shape::disk, 2, {cx, cy, 0.0}, {r, r, 0.0}, amp};
}
Primitive Primitive::ball(double cx, double cy, double cz, double r, double amp) {
  return {Shape::ball, 3, {cx, cy, cz}, {r, r, r}, amp};
}
Primitive Primitive::bump2(double cx, double cy, double r, double amp) {
  return {Shape::bump, 2, {cx, cy, 0.0}, {r, r, 0.0}, amp};
}
Primitive Primitive::bump3(double cx, double cy, double cz, double r, double amp) {
  return {Shape::bump, 3, {cx, cy, cz}, {r, r, r}, amp};
}
Primitive Primitive::rect(double cx, double cy, double hx, double hy, double amp) {
  return {Shape::rect, 2, {cx, cy, 0.0}, {hx, hy, 0.0}, amp};
}
Primitive Primitive::box(double cx, double cy, double cz, double hx, double hy, double hz, double amp) {
  return {Shape::box, 3, {cx, cy, cz}, {hx, hy, hz}, amp};
}

double Primitive::eval(const Point& x) const {
  switch (shape) {
    case Shape::disk:
    case Shape::ball: {
      double r2 = 0.0;
      for (int a = 0; a < dim; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
      return r2 <= size[0] * size[0] ? amp : 0.0;
    }
    case Shape::bump: {
      double r2 = 0.0;
      for (int a = 0; a < dim; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
      double q = 1.0 - r2 / (size[0] * size[0]);
      return q > 0.0 ? amp * q * q * q : 0.0;
    }
    case Shape::rect:
    case Shape::box: {
      for (int a = 0; a < dim; ++a)
        if (std::abs(x[a] - center[a]) > size[a]) return 0.0;
      return amp;
    }
  }
  return 0.0;
}

double Primitive::bounding_radius() const {
  if (shape == Shape::rect || shape == Shape::box) {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += size[a] * size[a];
    return std::sqrt(s);
  }
  return size[0];
}

void Primitive::validate() const {
  for (int a = 0; a < dim; ++a)
    if (!(size[a] > 0.0)) throw Error(ErrorCode::invalid_argument, "primitive size parameters must be positive");
  if (!std::isfinite(amp)) throw Error(ErrorCode::invalid_argument, "primitive amplitude must be finite");
}

int PhantomSpec::dim() const { return primitives.empty() ? 0 : primitives.front().dim; }

PhantomSpec PhantomSpec::concat(const PhantomSpec& other) const {
  PhantomSpec out = *this;
  out.primitives.insert(out.primitives.end(), other.primitives.begin(), other.primitives.end());
  return out;
}

PhantomSpec PhantomSpec::reflected(const Point& origin, const Point& dir) const {
  PhantomSpec out;
  for (Primitive p : primitives) {
    Point v{p.center[0] - origin[0], p.center[1] - origin[1], 0.0};
    double along = v[0] * dir[0] + v[1] * dir[1];
    p.center[0] = origin[0] + 2.0 * along * dir[0] - v[0];
    p.center[1] = origin[1] + 2.0 * along * dir[1] - v[1];
    out.primitives.push_back(p);
  }
  return out;
}

PhantomSpec PhantomSpec::scaled(double factor) const {
  PhantomSpec out = *this;
  for (auto& p : out.primitives) p.amp *= factor;
  return out;
}

double eval_phantom(const PhantomSpec& spec, const Point& x) {
  double s = 0.0;
  for (const auto& p : spec.primitives) s += p.eval(x);
  return s;
}

ScalarField rasterize_phantom(const PhantomSpec& spec, const Grid& grid, std::vector<std::string>* warnings) {
  grid.validate();
  for (std::size_t i = 0; i < spec.primitives.size(); ++i) {
    const auto& p = spec.primitives[i];
    p.validate();
    if (p.dim != grid.dim)
      throw Error(ErrorCode::dimension_mismatch, "primitive dimension does not match grid dimension");
    bool inside = true;
    for (int a = 0; a < grid.dim; ++a) {
      double half = (p.shape == Shape::rect || p.shape == Shape::box) ? p.size[a] : p.size[0];
      double lo = grid.origin[a], hi = grid.origin[a] + grid.extent(a);
      if (p.center[a] - half < lo || p.center[a] + half > hi) inside = false;
    }
    if (!inside && warnings) warnings->push_back("primitive " + std::to_string(i) + " extends outside the grid");
  }
  std::vector<double> v(grid.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = eval_phantom(spec, grid.node(i));
  return ScalarField(grid, std::move(v));
}

namespace {

Primitive parse_line(const std::string& kw, const std::vector<double>& a, int lineno) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::invalid_argument, "phantom line " + std::to_string(lineno) + ": " + why);
  };
  Primitive p;
  if (kw == "disk") {
    if (a.size() != 4) fail("disk expects cx cy r amp");
    p = Primitive::disk(a[0], a[1], a[2], a[3]);
  } else if (kw == "ball") {
    if (a.size() != 5) fail("ball expects cx cy cz r amp");
    p = Primitive::ball(a[0], a[1], a[2], a[3], a[4]);
  } else if (kw == "bump") {
    if (a.size() == 4)
      p = Primitive::bump2(a[0], a[1], a[2], a[3]);
    else if (a.size() == 5)
      p = Primitive::bump3(a[0], a[1], a[2], a[3], a[4]);
    else
      fail("bump expects cx cy [cz] r amp");
  } else if (kw == "rect") {
    if (a.size() != 5) fail("rect expects cx cy hx hy amp");
    p = Primitive::rect(a[0], a[1], a[2], a[3], a[4]);
  } else if (kw == "box") {
    if (a.size() != 7) fail("box expects cx cy cz hx hy hz amp");
    p = Primitive::box(a[0], a[1], a[2], a[3], a[4], a[5], a[6]);
  } else {
    fail("unknown primitive '" + kw + "'");
  }
  try {
    p.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
  return p;
}

}  // namespace

PhantomSpec parse_phantom(std::string_view text) {
  PhantomSpec spec;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    std::vector<double> args;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        args.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw Error(ErrorCode::invalid_argument,
                    "phantom line " + std::to_string(lineno) + ": bad number '" + tok + "'");
      }
    }
    spec.primitives.push_back(parse_line(kw, args, lineno));
  }
  if (!spec.primitives.empty()) {
    int d = spec.primitives.front().dim;
    for (const auto& p : spec.primitives)
      if (p.dim != d) throw Error(ErrorCode::dimension_mismatch, "phantom mixes 2D and 3D primitives");
  }
  return spec;
}

PhantomSpec read_phantom(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::io, "cannot open phantom spec " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_phantom(ss.str());
}

std::string format_phantom(const PhantomSpec& spec) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (const auto& p : spec.primitives) {
    switch (p.shape) {
      case Shape::disk: os << "disk " << p.center[0] << ' ' << p.center[1] << ' ' << p.size[0]; break;
      case Shape::ball:
        os << "ball " << p.center[0] << ' ' << p.center[1] << ' ' << p.center[2] << ' ' << p.size[0];
        break;
      case Shape::bump:
        os << "bump " << p.center[0] << ' ' << p.center[1] << ' ';
        if (p.dim == 3) os << p.center[2] << ' ';
        os << p.size[0];
        break;
      case Shape::rect:
        os << "rect " << p.center[0] << ' ' << p.center[1] << ' ' << p.size[0] << ' ' << p.size[1];
        break;
      case Shape::box:
        os << "box " << p.center[0] << ' ' << p.center[1] << ' ' << p.center[2] << ' ' << p.size[0] << ' '
           << p.size[1] << ' ' << p.size[2];
        break;
    }
    os << ' ' << p.amp << '\n';
  }
  return os.str();
}

}  // namespace tat
