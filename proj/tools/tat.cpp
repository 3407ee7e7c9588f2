// tat: command-line front end for phantoms, forward models, reconstructions and audits.
#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "tat/analysis.hpp"
#include "tat/fbp.hpp"
#include "tat/forward.hpp"
#include "tat/io.hpp"
#include "tat/series.hpp"
#include "tat/wavesim.hpp"

using namespace tat;
using std::numbers::pi;

namespace {

constexpr int kExitArgs = 2;
constexpr int kExitGeometry = 3;
constexpr int kExitNumeric = 4;

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::dimension_mismatch:
    case ErrorCode::unsupported_geometry:
    case ErrorCode::unsupported_conversion: return kExitGeometry;
    case ErrorCode::numeric_failure: return kExitNumeric;
    default: return kExitArgs;
  }
}

// "x,y[,z]"; empty means the origin
Point to_point(const std::string& s) {
  Point p{0.0, 0.0, 0.0};
  if (s.empty()) return p;
  std::stringstream ss(s);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    if (i == 3) throw Error(ErrorCode::invalid_argument, "a point has at most 3 coordinates: " + s);
    try {
      std::size_t used = 0;
      p[i++] = std::stod(item, &used);
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::invalid_argument, "bad coordinate list: " + s);
    }
  }
  return p;
}

void warn_all(const std::vector<std::string>& w) {
  for (const auto& s : w) std::cerr << "warning: " << s << '\n';
}

struct GeometryOpts {
  std::string kind = "circle";
  double size = 1.0;
  std::string center;
  int detectors = 256;
  int nodes = 64;
  int n_lat = 32;
  int n_lon = 64;
  double angle0 = 0.0;
  double span = pi;

  void add(CLI::App* app) {
    app->add_option("--geometry", kind, "circle | arc | sphere | square | cube | line")
        ->capture_default_str()
        ->check(CLI::IsMember({"circle", "arc", "sphere", "square", "cube", "line"}));
    app->add_option("--radius", size, "radius, half side or half length")->capture_default_str()->check(
        CLI::PositiveNumber);
    app->add_option("--center", center, "detector-set centre x,y[,z] (default origin)");
    app->add_option("--detectors", detectors, "detectors on a circle, arc or line")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--nodes", nodes, "nodes per side of a square or cube")->capture_default_str()->check(
        CLI::Range(3, 100000));
    app->add_option("--lat", n_lat, "sphere latitudes")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--lon", n_lon, "sphere longitudes")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--angle0", angle0, "first detector angle (circle, arc) or line direction")
        ->capture_default_str();
    app->add_option("--span", span, "arc span in radians")->capture_default_str()->check(CLI::Range(0.0, 2.0 * pi));
  }

  DetectorGeometry build() const {
    Point c = to_point(center);
    if (kind == "circle") return DetectorGeometry::circle(c, size, detectors, angle0);
    if (kind == "arc") return DetectorGeometry::arc(c, size, angle0, span, detectors);
    if (kind == "sphere") return DetectorGeometry::sphere(c, size, n_lat, n_lon);
    if (kind == "square") return DetectorGeometry::square_boundary(c, size, nodes);
    if (kind == "cube") return DetectorGeometry::cube_boundary(c, size, nodes);
    return DetectorGeometry::line_segment(c, size, angle0, detectors);
  }
};

DataKind parse_kind(const std::string& s) {
  if (s == "mean") return DataKind::mean;
  if (s == "integral") return DataKind::integral;
  return DataKind::pressure;
}

struct GridOpts {
  int n = 128;
  double extent = 0.0;
  std::string center;

  void add(CLI::App* app, const char* extent_help) {
    app->add_option("--grid", n, "nodes per axis")->capture_default_str()->check(CLI::Range(2, 100000));
    app->add_option("--extent", extent, extent_help)->capture_default_str();
    app->add_option("--center", center, "grid centre x,y[,z] (default: detector centre or origin)");
  }
};

void check_finite(const ScalarField& f) {
  for (double v : f.values())
    if (!std::isfinite(v)) throw Error(ErrorCode::numeric_failure, "NaN or infinity in the result");
}

// --config key=value lines become --key value tokens placed right after the
// subcommand, so explicit flags (parsed later, last one wins) override them
std::vector<std::string> expand_config(std::vector<std::string> args, const std::vector<std::string>& subcommands) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config file " + path);
  std::vector<std::string> extra;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::invalid_argument, path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error(ErrorCode::invalid_argument, path + ":" + std::to_string(lineno) + ": empty key");
    extra.push_back("--" + key);
    extra.push_back(value);
  }
  std::size_t at = args.size();
  for (std::size_t i = 0; i < args.size(); ++i)
    if (std::find(subcommands.begin(), subcommands.end(), args[i]) != subcommands.end()) {
      at = i + 1;
      break;
    }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermoacoustic tomography toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  int threads = 0;
  std::string config_path;
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)")->capture_default_str()->check(
      CLI::NonNegativeNumber);
  app.add_option("--config", config_path, "file of key=value lines, overridden by explicit flags");
  app.fallthrough();

  // phantom
  auto* ph = app.add_subcommand("phantom", "rasterize a phantom spec onto a grid");
  std::string ph_spec, ph_out;
  GridOpts ph_grid;
  ph_grid.extent = 2.0;
  ph->add_option("--spec", ph_spec, "phantom spec file")->required();
  ph_grid.add(ph, "grid side length");
  ph->add_option("--out", ph_out, "output field file")->required();

  // forward
  auto* fw = app.add_subcommand("forward", "spherical means or integrals at the detectors");
  std::string fw_spec, fw_field, fw_out, fw_kind = "integral", fw_quad = "analytic";
  GeometryOpts fw_geom;
  int fw_samples = 512, fw_angular = 512, fw_lat = 64, fw_lon = 128;
  double fw_tmax = 0.0, fw_noise = 0.0;
  unsigned fw_seed = 1;
  auto* fw_src = fw->add_option_group("source");
  fw_src->add_option("--spec", fw_spec, "phantom spec file");
  fw_src->add_option("--field", fw_field, "field file");
  fw_src->require_option(1);
  fw_geom.add(fw);
  fw->add_option("--samples", fw_samples, "radial samples t_j = j dt")->capture_default_str()->check(
      CLI::Range(2, 10000000));
  fw->add_option("--tmax", fw_tmax, "largest radius (0: detector diameter, box diagonal for square/cube)")
      ->capture_default_str();
  fw->add_option("--kind", fw_kind, "mean | integral")->capture_default_str()->check(
      CLI::IsMember({"mean", "integral"}));
  fw->add_option("--quadrature", fw_quad, "analytic | closed | grid")->capture_default_str()->check(
      CLI::IsMember({"analytic", "closed", "grid"}));
  fw->add_option("--n-angular", fw_angular, "2D circle nodes")->capture_default_str()->check(CLI::PositiveNumber);
  fw->add_option("--n-lat", fw_lat, "3D latitudes")->capture_default_str()->check(CLI::PositiveNumber);
  fw->add_option("--n-lon", fw_lon, "3D longitudes")->capture_default_str()->check(CLI::PositiveNumber);
  fw->add_option("--noise", fw_noise, "additive Gaussian noise, relative to the data RMS")->capture_default_str()->check(
      CLI::NonNegativeNumber);
  fw->add_option("--seed", fw_seed, "noise seed")->capture_default_str();
  fw->add_option("--out", fw_out, "output data file")->required();

  // wave-forward
  auto* wf = app.add_subcommand("wave-forward", "pressure traces from finite differences");
  std::string wf_field, wf_speed, wf_out;
  double wf_c = 1.0;
  FdConfig wf_cfg;
  GeometryOpts wf_geom;
  wf_geom.kind = "square";
  wf->add_option("--field", wf_field, "initial pressure field")->required();
  wf->add_option("--speed", wf_speed, "sound-speed field on the same grid (default: constant --c)");
  wf->add_option("--c", wf_c, "constant sound speed")->capture_default_str()->check(CLI::PositiveNumber);
  wf_geom.add(wf);
  wf->add_option("--T", wf_cfg.T, "final time")->capture_default_str()->check(CLI::PositiveNumber);
  wf->add_option("--cfl", wf_cfg.cfl, "c dt / h (0: 0.5 in 2D, 0.4 in 3D)")->capture_default_str();
  wf->add_option("--padding", wf_cfg.padding, "padding cells per side (negative: automatic)")->capture_default_str();
  wf->add_option("--out", wf_out, "output data file")->required();

  // recon
  auto* rc = app.add_subcommand("recon", "reconstruct the initial pressure");
  std::string rc_method, rc_in, rc_out, rc_speed;
  GridOpts rc_grid;
  FbpOptions rc_fbp;
  NortonOptions rc_norton;
  SeriesOptions rc_series;
  int rc_kmax = 600;
  double rc_cfl = 0.0;
  std::string rc_nd = "green";
  std::vector<std::string> methods;
  for (auto v : {FbpVariant::fpr3d_laplacian, FbpVariant::fpr3d_d2t, FbpVariant::fpr3d_ddt_chain,
                 FbpVariant::finch2d_laplacian, FbpVariant::finch2d_filtered, FbpVariant::kunyansky_general,
                 FbpVariant::kunyansky_2d, FbpVariant::kunyansky_3d})
    methods.push_back(to_string(v));
  for (const char* m : {"norton2d", "cubic_series", "square_series_2d", "eigen_expansion", "time_reversal"})
    methods.push_back(m);
  rc->add_option("--method", rc_method, "reconstruction method")->required()->check(CLI::IsMember(methods));
  rc->add_option("--in", rc_in, "input data file")->required();
  rc_grid.add(rc, "grid side length (0: detector diameter); series and grid-based methods use their own grid");
  rc->add_option("--lambda-max", rc_fbp.lambda_max, "kunyansky_general / norton2d lambda range (0: pi/dt)")
      ->capture_default_str();
  rc->add_option("--dlambda", rc_fbp.dlambda, "lambda step (0: pi/(2 t_max))")->capture_default_str();
  rc->add_option("--use-hankel", rc_norton.use_hankel, "norton2d: divide by H_m instead of masked J_m")
      ->capture_default_str();
  rc->add_option("--m-max", rc_series.m_max, "angular order (norton2d) or sine modes per axis (0: maximum)")
      ->capture_default_str();
  rc->add_option("--interp-order", rc_series.interp_order, "series: Lagrange points in lambda")
      ->capture_default_str()
      ->check(CLI::Range(2, 16));
  rc->add_option("--k-max", rc_kmax, "eigen_expansion: eigenpairs used")->capture_default_str()->check(
      CLI::PositiveNumber);
  rc->add_option("--normal-derivative", rc_nd, "eigen_expansion: green | one-sided")
      ->capture_default_str()
      ->check(CLI::IsMember({"green", "one-sided"}));
  rc->add_option("--speed", rc_speed, "sound-speed field for eigen_expansion / time_reversal (default 1)");
  rc->add_option("--cfl", rc_cfl, "time_reversal CFL number (0: default)")->capture_default_str();
  rc->add_option("--out", rc_out, "output field file")->required();

  // range-check
  auto* rg = app.add_subcommand("range-check", "audit data against the range conditions");
  std::string rg_in, rg_out;
  int rg_k = 3, rg_m = 16, rg_q = 10;
  double rg_tol = 1e-2;
  rg->add_option("--in", rg_in, "input data file (circle geometry)")->required();
  rg->add_option("--k-max", rg_k, "highest moment order")->capture_default_str()->check(CLI::NonNegativeNumber);
  rg->add_option("--m-max", rg_m, "highest angular order")->capture_default_str()->check(CLI::NonNegativeNumber);
  rg->add_option("--q-max", rg_q, "Bessel zeros per order")->capture_default_str()->check(CLI::PositiveNumber);
  rg->add_option("--tol", rg_tol, "pass tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  rg->add_option("--out", rg_out, "CSV report (default: stdout)");

  // visibility
  auto* vs = app.add_subcommand("visibility", "predict visible boundary points for a circle or arc");
  std::string vs_spec, vs_out;
  int vs_samples = 512;
  GeometryOpts vs_geom;
  vs_geom.kind = "arc";
  vs->add_option("--spec", vs_spec, "phantom spec file")->required();
  vs_geom.add(vs);
  vs->add_option("--samples", vs_samples, "boundary points per primitive")->capture_default_str()->check(
      CLI::Range(4, 10000000));
  vs->add_option("--out", vs_out, "CSV output (default: stdout)");

  // metrics
  auto* mt = app.add_subcommand("metrics", "compare a reconstruction with a reference");
  std::string mt_ref, mt_rec, mt_spec, mt_out;
  mt->add_option("--ref", mt_ref, "reference field")->required();
  mt->add_option("--rec", mt_rec, "reconstructed field")->required();
  mt->add_option("--edges", mt_spec, "phantom spec whose rectangles define edge segments");
  mt->add_option("--out", mt_out, "CSV output (default: stdout)");

  // export-pgm
  auto* ex = app.add_subcommand("export-pgm", "write a field (or a 3D slice) as an ASCII PGM");
  std::string ex_in, ex_out;
  int ex_slice = -1;
  ex->add_option("--in", ex_in, "field file")->required();
  ex->add_option("--out", ex_out, "PGM file; scaling goes to <out>.scale.csv")->required();
  ex->add_option("--slice", ex_slice, "3D slice index along the last axis (negative: middle)")->capture_default_str();

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(args, {"phantom", "forward", "wave-forward", "recon", "range-check", "visibility",
                                "metrics", "export-pgm"});
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int rc0 = app.exit(e);
    return rc0 == 0 ? 0 : kExitArgs;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitArgs;
  }
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*ph) {
      PhantomSpec spec = read_phantom(ph_spec);
      if (spec.primitives.empty()) throw Error(ErrorCode::invalid_argument, "phantom spec is empty");
      Grid g = Grid::centered(spec.dim(), ph_grid.n, ph_grid.extent, to_point(ph_grid.center));
      std::vector<std::string> w;
      auto f = rasterize_phantom(spec, g, &w);
      warn_all(w);
      write_field(ph_out, f);
    } else if (*fw) {
      auto geom = fw_geom.build();
      double tmax = fw_tmax;
      if (tmax <= 0.0) tmax = 2.0 * fw_geom.size * (geom.is_box_boundary() ? std::sqrt(double(geom.dim())) : 1.0);
      QuadratureSpec q;
      q.n_angular = fw_angular;
      q.n_lat = fw_lat;
      q.n_lon = fw_lon;
      q.mode = fw_quad == "closed" ? QuadratureMode::closed_form
               : fw_quad == "grid" ? QuadratureMode::grid_interpolated
                                   : QuadratureMode::analytic_phantom;
      const double dt = tmax / (fw_samples - 1);
      TatData d;
      if (!fw_spec.empty()) {
        PhantomSpec spec = read_phantom(fw_spec);
        if (spec.dim() != geom.dim())
          throw Error(ErrorCode::dimension_mismatch, "phantom and detector geometry dimensions differ");
        d = spherical_forward(spec, geom, fw_samples, dt, parse_kind(fw_kind), q);
      } else {
        auto f = read_field(fw_field);
        if (f.grid().dim != geom.dim())
          throw Error(ErrorCode::dimension_mismatch, "field and detector geometry dimensions differ");
        q.mode = QuadratureMode::grid_interpolated;
        d = spherical_forward(f, geom, fw_samples, dt, parse_kind(fw_kind), q);
      }
      if (fw_noise > 0.0) {
        std::mt19937_64 rng(fw_seed);
        std::normal_distribution<double> n01;
        double rms = l2_norm(d.values()) / std::sqrt(double(d.values().size()));
        std::vector<double> v(d.values().begin(), d.values().end());
        const bool keep_origin = d.kind() == DataKind::integral;
        for (std::size_t i = 0; i < v.size(); ++i)
          if (!keep_origin || i % d.n_samples() != 0) v[i] += fw_noise * rms * n01(rng);
        d = TatData(d.geometry(), d.kind(), d.n_samples(), d.dt(), std::move(v));
      }
      write_tatdata(fw_out, d);
    } else if (*wf) {
      auto f = read_field(wf_field);
      auto c = wf_speed.empty() ? ScalarField::constant(f.grid(), wf_c) : read_field(wf_speed);
      auto geom = wf_geom.build();
      if (geom.dim() != f.grid().dim)
        throw Error(ErrorCode::dimension_mismatch, "field and detector geometry dimensions differ");
      FdReport rep;
      auto d = fd_forward(f, c, geom, wf_cfg, &rep);
      warn_all(rep.warnings);
      std::cerr << "dt " << rep.dt << ", padding " << rep.padding << ", residual at T " << rep.residual_at_T << '\n';
      write_tatdata(wf_out, d);
    } else if (*rc) {
      TatData d = read_tatdata(rc_in);
      const auto& geom = d.geometry();
      std::vector<std::string> w;
      auto recon_grid = [&] {
        double ext = rc_grid.extent > 0.0 ? rc_grid.extent : 2.0 * geom.size();
        Point c = rc_grid.center.empty() ? geom.center() : to_point(rc_grid.center);
        return Grid::centered(d.dim(), rc_grid.n, ext, c);
      };
      auto speed_on = [&](const Grid& g) {
        if (rc_speed.empty()) return ScalarField::constant(g, 1.0);
        auto c = read_field(rc_speed);
        if (!(c.grid() == g)) throw Error(ErrorCode::dimension_mismatch, "speed field must live on the detector grid");
        return c;
      };
      ScalarField out;
      if (rc_method == "norton2d") {
        rc_norton.m_max = rc_series.m_max > 0 ? rc_series.m_max : -1;
        rc_norton.lambda_max = rc_fbp.lambda_max;
        rc_norton.dlambda = rc_fbp.dlambda;
        out = norton2d(d, recon_grid(), rc_norton, &w);
      } else if (rc_method == "cubic_series") {
        rc_series.dlambda = rc_fbp.dlambda;
        out = cubic_series(d, rc_series);
      } else if (rc_method == "square_series_2d") {
        rc_series.dlambda = rc_fbp.dlambda;
        out = square_series_2d(d, rc_series);
      } else if (rc_method == "eigen_expansion") {
        if (!geom.is_box_boundary() || d.dim() != 2)
          throw Error(ErrorCode::unsupported_geometry, "eigen_expansion needs square-boundary pressure data");
        out = eigen_expand_variable_speed(d, speed_on(geom.node_grid()), rc_kmax,
                                          rc_nd == "green" ? NormalDerivative::discrete_green
                                                           : NormalDerivative::one_sided2);
      } else if (rc_method == "time_reversal") {
        if (!geom.is_box_boundary())
          throw Error(ErrorCode::unsupported_geometry, "time_reversal needs square or cube boundary data");
        FdConfig cfg;
        cfg.cfl = rc_cfl;
        out = time_reversal(d, speed_on(geom.node_grid()), cfg, &w);
      } else {
        out = fbp_invert(d, recon_grid(), parse_fbp_variant(rc_method), rc_fbp, &w);
      }
      warn_all(w);
      check_finite(out);
      write_field(rc_out, out);
    } else if (*rg) {
      TatData d = read_tatdata(rg_in);
      if (d.dim() != 2) throw Error(ErrorCode::dimension_mismatch, "range checks are implemented for 2D circles");
      RangeReport rep = moment_check(d, rg_k, rg_tol);
      rep.append(orthogonality_check(d, rg_m, rg_q, rg_tol));
      rep.tolerance = rg_tol;
      if (rg_out.empty()) {
        rep.write_csv(std::cout);
      } else {
        std::ofstream os(rg_out);
        if (!os) throw Error(ErrorCode::io, "cannot write " + rg_out);
        rep.write_csv(os);
      }
      std::cerr << "range-check: " << (rep.pass() ? "pass" : "fail") << ", max residual " << rep.max_residual()
                << '\n';
    } else if (*vs) {
      auto map = visibility_map(read_phantom(vs_spec), vs_geom.build(), vs_samples);
      if (vs_out.empty()) {
        map.write_csv(std::cout);
      } else {
        std::ofstream os(vs_out);
        if (!os) throw Error(ErrorCode::io, "cannot write " + vs_out);
        map.write_csv(os);
      }
    } else if (*mt) {
      std::vector<EdgeSegment> edges;
      if (!mt_spec.empty()) {
        int i = 0;
        for (const auto& p : read_phantom(mt_spec).primitives) {
          if (p.shape == Shape::rect)
            for (auto e : rect_edges(p)) {
              e.label = "rect" + std::to_string(i) + "_" + e.label;
              edges.push_back(e);
            }
          ++i;
        }
      }
      auto m = compute_metrics(read_field(mt_ref), read_field(mt_rec), edges);
      std::ostringstream os;
      os.precision(10);
      os << "metric,value\nrel_l2," << m.rel_l2 << "\nrel_linf," << m.rel_linf << '\n';
      for (const auto& e : m.edges) os << "sharpness_" << e.label << ',' << e.value << '\n';
      if (mt_out.empty()) {
        std::cout << os.str();
      } else {
        std::ofstream f(mt_out);
        if (!f) throw Error(ErrorCode::io, "cannot write " + mt_out);
        f << os.str();
      }
    } else if (*ex) {
      export_pgm(ex_out, read_field(ex_in), ex_slice);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
