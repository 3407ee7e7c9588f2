#include "tat/wavesim.hpp"

#include <algorithm>
#include <cmath>

namespace tat {

void FdConfig::validate(int dim) const {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::dimension_mismatch, "wave solver needs a 2D or 3D grid");
  const double c = cfl_for(dim);
  if (!(c > 0.0) || c > 1.0 / std::sqrt(static_cast<double>(dim)) + 1e-12)
    throw Error(ErrorCode::invalid_argument,
                "CFL number " + std::to_string(c) + " violates the stability bound 1/sqrt(" + std::to_string(dim) + ")");
  if (!(T > 0.0)) throw Error(ErrorCode::invalid_argument, "final time T must be positive");
}

namespace {

double min_spacing(const Grid& g) {
  double h = g.spacing[0];
  for (int a = 1; a < g.dim; ++a) h = std::min(h, g.spacing[a]);
  return h;
}

void check_speed(const ScalarField& c) {
  if (!(c.min() > 0.0)) throw Error(ErrorCode::invalid_argument, "sound speed must be positive everywhere");
}

/// Precomputed multilinear stencils for sampling a grid function at fixed points.
struct PointSampler {
  std::vector<std::size_t> idx;
  std::vector<double> w;
  int corners = 0;

  PointSampler(const Grid& g, const std::vector<Point>& pts) {
    corners = 1 << g.dim;
    for (const Point& x : pts) {
      std::array<int, 3> i0{0, 0, 0};
      std::array<double, 3> fr{0.0, 0.0, 0.0};
      for (int a = 0; a < g.dim; ++a) {
        double u = (x[a] - g.origin[a]) / g.spacing[a];
        double r = std::round(u);
        if (std::abs(u - r) < 1e-9) u = r;
        if (u < 0.0 || u > g.n[a] - 1)
          throw Error(ErrorCode::unsupported_geometry, "detector lies outside the computational grid");
        int b = std::min(static_cast<int>(std::floor(u)), g.n[a] - 2);
        i0[a] = b;
        fr[a] = u - b;
      }
      for (int m = 0; m < corners; ++m) {
        std::array<int, 3> ii = i0;
        double wt = 1.0;
        for (int a = 0; a < g.dim; ++a) {
          int bit = (m >> a) & 1;
          ii[a] += bit;
          wt *= bit ? fr[a] : 1.0 - fr[a];
        }
        idx.push_back(g.index(ii[0], ii[1], ii[2]));
        w.push_back(wt);
      }
    }
  }

  double sample(std::span<const double> v, std::size_t p) const {
    double s = 0.0;
    for (int m = 0; m < corners; ++m) s += w[p * corners + m] * v[idx[p * corners + m]];
    return s;
  }
};

}  // namespace

double stable_dt(const ScalarField& c, double cfl) { return cfl * min_spacing(c.grid()) / c.max(); }

int required_padding(const ScalarField& c, double T) {
  // a reflection must travel out through the padding and back again
  return static_cast<int>(std::ceil(c.max() * T / (2.0 * min_spacing(c.grid())))) + 2;
}

WaveSolver::WaveSolver(const ScalarField& c, double dt) : grid_(c.grid()), dt_(dt) {
  check_speed(c);
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "time step must be positive");
  double bound = 1.0 / std::sqrt(static_cast<double>(grid_.dim));
  if (c.max() * dt / min_spacing(grid_) > bound + 1e-12)
    throw Error(ErrorCode::invalid_argument, "time step violates the CFL bound");
  const std::size_t n = grid_.size();
  c2dt2_.resize(n);
  inv_c2_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c2dt2_[i] = c[i] * c[i] * dt * dt;
    inv_c2_[i] = 1.0 / (c[i] * c[i]);
  }
  prev_.assign(n, 0.0);
  cur_.assign(n, 0.0);
  next_.assign(n, 0.0);
}

void WaveSolver::laplacian_update(const std::vector<double>& p, std::vector<double>& out, double scale) const {
  // out[i] += scale * c^2 dt^2 Lap(p)[i] on interior nodes
  const Grid& g = grid_;
  const double ix = 1.0 / (g.spacing[0] * g.spacing[0]), iy = 1.0 / (g.spacing[1] * g.spacing[1]);
  if (g.dim == 2) {
    const int nx = g.n[0], ny = g.n[1];
#pragma omp parallel for schedule(static)
    for (int i = 1; i < nx - 1; ++i) {
      const std::size_t row = static_cast<std::size_t>(i) * ny;
      for (int j = 1; j < ny - 1; ++j) {
        std::size_t q = row + j;
        double lap = (p[q + ny] + p[q - ny] - 2.0 * p[q]) * ix + (p[q + 1] + p[q - 1] - 2.0 * p[q]) * iy;
        out[q] += scale * c2dt2_[q] * lap;
      }
    }
    return;
  }
  const double iz = 1.0 / (g.spacing[2] * g.spacing[2]);
  const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
  const std::size_t sx = static_cast<std::size_t>(ny) * nz, sy = nz;
#pragma omp parallel for schedule(static)
  for (int i = 1; i < nx - 1; ++i)
    for (int j = 1; j < ny - 1; ++j) {
      const std::size_t base = i * sx + j * sy;
      for (int k = 1; k < nz - 1; ++k) {
        std::size_t q = base + k;
        double c2 = 2.0 * p[q];
        double lap = (p[q + sx] + p[q - sx] - c2) * ix + (p[q + sy] + p[q - sy] - c2) * iy +
                     (p[q + 1] + p[q - 1] - c2) * iz;
        out[q] += scale * c2dt2_[q] * lap;
      }
    }
}

void WaveSolver::start(std::span<const double> f) {
  if (f.size() != grid_.size()) throw Error(ErrorCode::dimension_mismatch, "initial field does not match the grid");
  cur_.assign(f.begin(), f.end());
  prev_ = cur_;
  laplacian_update(cur_, prev_, 0.5);
  n_ = 0;
}

void WaveSolver::start_at_rest() {
  std::fill(prev_.begin(), prev_.end(), 0.0);
  std::fill(cur_.begin(), cur_.end(), 0.0);
  n_ = 0;
}

void WaveSolver::step() {
  const std::size_t n = grid_.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) next_[i] = 2.0 * cur_[i] - prev_[i];
  laplacian_update(cur_, next_, 1.0);
  // outer boundary held at zero
  const Grid& g = grid_;
  if (g.dim == 2) {
    const int nx = g.n[0], ny = g.n[1];
    for (int j = 0; j < ny; ++j) next_[j] = next_[static_cast<std::size_t>(nx - 1) * ny + j] = 0.0;
    for (int i = 0; i < nx; ++i) next_[static_cast<std::size_t>(i) * ny] = next_[static_cast<std::size_t>(i) * ny + ny - 1] = 0.0;
  } else {
    const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) {
        bool face = i == 0 || i == nx - 1 || j == 0 || j == ny - 1;
        std::size_t base = g.index(i, j, 0);
        if (face) {
          std::fill(next_.begin() + base, next_.begin() + base + nz, 0.0);
        } else {
          next_[base] = 0.0;
          next_[base + nz - 1] = 0.0;
        }
      }
  }
  std::swap(prev_, cur_);
  std::swap(cur_, next_);
  ++n_;
}

double WaveSolver::energy() const {
  const Grid& g = grid_;
  double vol = 1.0;
  for (int a = 0; a < g.dim; ++a) vol *= g.spacing[a];
  double kin = 0.0, pot = 0.0;
  const std::size_t n = g.size();
  std::array<std::size_t, 3> stride{};
  stride[g.dim - 1] = 1;
  for (int a = g.dim - 2; a >= 0; --a) stride[a] = stride[a + 1] * g.n[a + 1];
  for (std::size_t q = 0; q < n; ++q) {
    double v = (cur_[q] - prev_[q]) / dt_;
    kin += inv_c2_[q] * v * v;
    auto ijk = g.unflatten(q);
    for (int a = 0; a < g.dim; ++a) {
      if (ijk[a] + 1 >= g.n[a]) continue;
      std::size_t r = q + stride[a];
      pot += (cur_[r] - cur_[q]) * (prev_[r] - prev_[q]) / (g.spacing[a] * g.spacing[a]);
    }
  }
  return 0.5 * (kin + pot) * vol;
}

TatData fd_forward(const ScalarField& f, const ScalarField& c, const DetectorGeometry& geom, const FdConfig& cfg,
                   FdReport* report) {
  const Grid& g0 = f.grid();
  cfg.validate(g0.dim);
  if (!(c.grid() == g0)) throw Error(ErrorCode::dimension_mismatch, "phantom and speed fields must share a grid");
  if (geom.dim() != g0.dim) throw Error(ErrorCode::dimension_mismatch, "geometry and grid dimensions differ");
  check_speed(c);

  const int need = required_padding(c, cfg.T);
  int pad = cfg.padding;
  if (pad < 0) {
    pad = need;
  } else if (pad < need) {
    throw Error(ErrorCode::invalid_argument, "padding of " + std::to_string(pad) + " cells is too small for T = " +
                                                 std::to_string(cfg.T) + "; at least " + std::to_string(need) +
                                                 " cells are required");
  }

  Grid gp = g0;
  for (int a = 0; a < g0.dim; ++a) {
    gp.n[a] += 2 * pad;
    gp.origin[a] -= pad * g0.spacing[a];
  }
  std::vector<double> fp(gp.size(), 0.0), cp(gp.size());
  for (std::size_t q = 0; q < gp.size(); ++q) {
    auto ijk = gp.unflatten(q);
    std::array<int, 3> s{0, 0, 0};
    bool inside = true;
    for (int a = 0; a < g0.dim; ++a) {
      int v = ijk[a] - pad;
      if (v < 0 || v >= g0.n[a]) inside = false;
      s[a] = std::clamp(v, 0, g0.n[a] - 1);
    }
    cp[q] = c.at(s[0], s[1], s[2]);
    if (inside) fp[q] = f.at(s[0], s[1], s[2]);
  }
  ScalarField cpad(gp, std::move(cp));

  // detectors must sit inside the unpadded grid for the padding bound to hold
  for (const Point& y : geom.positions())
    for (int a = 0; a < g0.dim; ++a)
      if (y[a] < g0.origin[a] - 1e-9 || y[a] > g0.origin[a] + g0.extent(a) + 1e-9)
        throw Error(ErrorCode::unsupported_geometry, "detectors must lie inside the phantom grid");

  const double dt = stable_dt(c, cfg.cfl_for(g0.dim));
  const int n_steps = static_cast<int>(std::ceil(cfg.T / dt - 1e-9));
  WaveSolver solver(cpad, dt);
  solver.start(fp);
  PointSampler sampler(gp, geom.positions());
  const std::size_t nd = geom.count();
  const int ns = n_steps + 1;
  std::vector<double> v(nd * ns);
  for (int m = 0; m <= n_steps; ++m) {
    if (m > 0) solver.step();
    auto p = solver.current();
    for (std::size_t i = 0; i < nd; ++i) v[i * ns + m] = sampler.sample(p, i);
  }

  if (report) {
    report->dt = dt;
    report->padding = pad;
    double fmax = f.max_abs(), rmax = 0.0;
    auto p = solver.current();
    for (std::size_t q = 0; q < gp.size(); ++q) {
      Point x = gp.node(q);
      bool enclosed;
      if (geom.is_closed_sphere()) {
        enclosed = distance(x, geom.center(), g0.dim) <= geom.size();
      } else if (geom.is_box_boundary()) {
        enclosed = true;
        for (int a = 0; a < g0.dim; ++a) enclosed = enclosed && std::abs(x[a] - geom.center()[a]) <= geom.size() + 1e-12;
      } else {
        enclosed = true;
        for (int a = 0; a < g0.dim; ++a)
          enclosed = enclosed && x[a] >= g0.origin[a] - 1e-12 && x[a] <= g0.origin[a] + g0.extent(a) + 1e-12;
      }
      if (enclosed) rmax = std::max(rmax, std::abs(p[q]));
    }
    report->residual_at_T = fmax > 0.0 ? rmax / fmax : 0.0;
  }
  return TatData(geom, DataKind::pressure, ns, dt, std::move(v));
}

ScalarField time_reversal(const TatData& data, const ScalarField& c, const FdConfig& cfg,
                          std::vector<std::string>* warnings) {
  const DetectorGeometry& geom = data.geometry();
  if (!geom.is_box_boundary())
    throw Error(ErrorCode::unsupported_geometry,
                std::string("time reversal needs a grid-conforming square or cube boundary, got ") + to_string(geom.kind()));
  if (data.kind() != DataKind::pressure) throw Error(ErrorCode::invalid_argument, "time reversal needs pressure data");
  const Grid g = geom.node_grid();
  if (!(c.grid() == g))
    throw Error(ErrorCode::unsupported_geometry, "speed field must live on the detector boundary's node grid");
  check_speed(c);
  FdConfig run = cfg;
  run.T = data.t_max() > 0.0 ? data.t_max() : 1.0;
  run.validate(g.dim);

  const double T = data.t_max();
  if (warnings && g.dim == 3 && c.max() - c.min() <= 1e-12 * c.max()) {
    double diam = 2.0 * geom.size() * std::sqrt(3.0) / c.max();
    if (T < diam)
      warnings->push_back("T = " + std::to_string(T) + " is below the domain diameter " + std::to_string(diam) +
                          "; the wave has not left the domain and the reconstruction will be incomplete");
  }

  const double dt_max = stable_dt(c, run.cfl_for(g.dim));
  const int sub = std::max(1, static_cast<int>(std::ceil(data.dt() / dt_max - 1e-9)));
  const double dt = data.dt() / sub;
  const int total = (data.n_samples() - 1) * sub;

  const auto lut = geom.node_lookup();
  std::vector<std::pair<std::size_t, std::size_t>> bnodes;  // (grid node, detector)
  for (std::size_t q = 0; q < lut.size(); ++q)
    if (lut[q] >= 0) bnodes.emplace_back(q, static_cast<std::size_t>(lut[q]));
  auto impose = [&](std::span<double> p, int m) {
    int s = m / sub, r = m % sub;
    double w = static_cast<double>(r) / sub;
    for (auto [q, det] : bnodes) {
      double v0 = data.at(det, s);
      p[q] = r == 0 ? v0 : (1.0 - w) * v0 + w * data.at(det, s + 1);
    }
  };

  WaveSolver solver(c, dt);
  solver.start_at_rest();
  impose(solver.current_mut(), total);
  solver.reverse();
  impose(solver.current_mut(), total);
  for (int m = total - 1; m >= 0; --m) {
    solver.step();
    impose(solver.current_mut(), m);
  }
  return solver.field();
}

}  // namespace tat
