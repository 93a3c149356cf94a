#pragma once

// Command-line driver: `trajectory`, `qmap` and `sweep` subcommands.
//
// Exit codes: 0 success, 2 config error, 3 cross-check failure, 4 I/O error.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsync/amplitude.hpp"
#include "qsync/density_matrix.hpp"
#include "qsync/dynamics_map.hpp"
#include "qsync/io.hpp"
#include "qsync/quasimode.hpp"
#include "qsync/sweep.hpp"
#include "qsync/sync_measure.hpp"

namespace qsync::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kCrossCheckFailed = 3, kIoError = 4 };

class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Keys accepted in config files and as `--key` overrides.
inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "omega_rabi", "delta_drive", "gamma0", "lambda", "delta_spec",
      "t_final", "n_steps", "rho_gg", "rho_ge_re", "rho_ge_im",
      "phi", "solver", "cross_check", "workers", "threshold",
      "coupling_sweep_mode", "volterra_step", "snapshot_times", "q_theta_points", "q_phi_points",
      "heatmap", "x_param", "x_min", "x_max", "x_n",
      "y_param", "y_min", "y_max", "y_n", "observable",
      "t_eval", "out"};
  return keys;
}

struct RunConfig {
  SimConfig sim;
  double phi = 0.0;
  SolverTag solver = SolverTag::closed_form;
  bool cross_check = false;
  unsigned workers = 1;
  double volterra_step = 1e-3;
  std::vector<double> snapshot_times{0.0, 10.0, 100.0};
  std::size_t q_theta_points = 181;
  std::size_t q_phi_points = 361;
  bool heatmap = true;
  SweepSpec sweep;
  std::filesystem::path out_dir = ".";
};

namespace detail {

inline SolverTag parse_solver(const io::KeyValues& kv) {
  const std::string s = kv.get_string("solver", "closed_form");
  if (s == "closed_form") return SolverTag::closed_form;
  if (s == "ode") return SolverTag::ode_reduction;
  if (s == "volterra") return SolverTag::volterra;
  if (s == "pseudomode") return SolverTag::pseudomode;
  kv.error("solver", "unknown solver '" + s + "' (closed_form | ode | volterra | pseudomode)");
}

inline Axis parse_axis(const io::KeyValues& kv, const std::string& prefix, const Axis& fallback) {
  Axis a = fallback;
  const std::string key = prefix + "_param";
  if (kv.has(key)) {
    const auto p = parse_sweep_param(kv.get_string(key, ""));
    if (!p) kv.error(key, "unknown sweep parameter (delta_spec | omega_rabi | gamma0 | lambda)");
    a.param = *p;
  }
  a.min = kv.get_double(prefix + "_min", a.min);
  a.max = kv.get_double(prefix + "_max", a.max);
  const long long n = kv.get_int(prefix + "_n", a.n);
  if (n < 2 || n > 100000) kv.error(prefix + "_n", "axis needs between 2 and 100000 points");
  a.n = static_cast<int>(n);
  return a;
}

}  // namespace detail

/// Builds and validates the run configuration. Throws io::ConfigError.
inline RunConfig build_run_config(const io::KeyValues& kv) {
  for (const auto& [key, entry] : kv.entries()) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) kv.error(key, "unknown key");
  }

  RunConfig rc;
  SimConfig& sim = rc.sim;
  sim.drive.omega_rabi = kv.get_double("omega_rabi", 1.0);
  sim.drive.delta_drive = kv.get_double("delta_drive", 0.0);
  sim.spectrum.gamma0 = kv.get_double("gamma0", 1.0);
  sim.spectrum.lambda_width = kv.get_double("lambda", 0.1);
  sim.spectrum.delta_spec = kv.get_double("delta_spec", 0.0);
  sim.t_final = kv.get_double("t_final", 100.0);
  const long long n_steps = kv.get_int("n_steps", 1000);
  if (n_steps < 1 || n_steps > 100000000) kv.error("n_steps", "must be in [1, 1e8]");
  sim.n_steps = static_cast<int>(n_steps);

  const double gg = kv.get_double("rho_gg", 0.5);
  const complex ge(kv.get_double("rho_ge_re", 0.5), kv.get_double("rho_ge_im", 0.0));
  try {
    sim.initial_state = DensityMatrix::from_components(gg, ge);
  } catch (const std::invalid_argument& e) {
    kv.error(kv.has("rho_gg") ? "rho_gg" : "rho_ge_re", e.what());
  }

  auto check = [&](const char* key, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      kv.error(key, e.what());
    }
  };
  check("omega_rabi", [&] { sim.drive.validate(); });
  check("lambda", [&] { sim.spectrum.validate(); });
  check("t_final", [&] { sim.validate(); });

  rc.phi = kv.get_double("phi", 0.0);
  rc.solver = detail::parse_solver(kv);
  rc.cross_check = kv.get_bool("cross_check", false);
  const long long workers = kv.get_int("workers", 1);
  if (workers < 1 || workers > 1024) kv.error("workers", "must be in [1, 1024]");
  rc.workers = static_cast<unsigned>(workers);
  rc.volterra_step = kv.get_double("volterra_step", 1e-3);
  if (!(rc.volterra_step > 0.0)) kv.error("volterra_step", "must be > 0");
  rc.snapshot_times = kv.get_list("snapshot_times", rc.snapshot_times);
  for (double t : rc.snapshot_times)
    if (t < 0.0) kv.error("snapshot_times", "times must be >= 0");
  const long long nt = kv.get_int("q_theta_points", 181), np = kv.get_int("q_phi_points", 361);
  if (nt < 2 || nt > 10000) kv.error("q_theta_points", "must be in [2, 10000]");
  if (np < 2 || np > 10000) kv.error("q_phi_points", "must be in [2, 10000]");
  rc.q_theta_points = static_cast<std::size_t>(nt);
  rc.q_phi_points = static_cast<std::size_t>(np);
  rc.heatmap = kv.get_bool("heatmap", true);
  rc.out_dir = kv.get_string("out", ".");

  SweepSpec& sw = rc.sweep;
  sw.drive = sim.drive;
  sw.spectrum = sim.spectrum;
  sw.initial_state = sim.initial_state;
  sw.t_eval = kv.get_double("t_eval", sim.t_final);
  sw.phi = rc.phi;
  sw.threshold = kv.get_double("threshold", 1e-3);
  if (kv.has("observable")) {
    const auto o = parse_observable(kv.get_string("observable", ""));
    if (!o) kv.error("observable", "unknown observable (max_s | s_at_phi | phi_star)");
    sw.observable = *o;
  }
  if (kv.has("coupling_sweep_mode")) {
    const auto m = parse_coupling_mode(kv.get_string("coupling_sweep_mode", ""));
    if (!m) kv.error("coupling_sweep_mode", "expected absolute | tied");
    sw.coupling_mode = *m;
  }
  sw.x = detail::parse_axis(kv, "x", sw.x);
  sw.y = detail::parse_axis(kv, "y", sw.y);
  check("x_param", [&] { sw.validate(); });
  return rc;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p, bool binary = false) {
  std::ofstream f(p, binary ? std::ios::binary : std::ios::out);
  if (!f) throw IoError("cannot open " + p.string() + " for writing");
  return f;
}

inline void finish(std::ofstream& f, const std::filesystem::path& p) {
  f.flush();
  if (!f) throw IoError("write failed for " + p.string());
}

inline void write_param_comments(std::ostream& out, const DriveParams& d, const SpectrumParams& s) {
  out << "# omega_rabi = " << io::format_double(d.omega_rabi) << '\n'
      << "# delta_drive = " << io::format_double(d.delta_drive) << '\n'
      << "# gamma0 = " << io::format_double(s.gamma0) << '\n'
      << "# lambda = " << io::format_double(s.lambda_width) << '\n'
      << "# delta_spec = " << io::format_double(s.delta_spec) << '\n';
}

// q on the trajectory grid from the selected solver.
inline AmplitudeSeries solve_amplitude(const RunConfig& rc, SolverTag solver,
                                       const std::vector<double>& grid) {
  const auto& d = rc.sim.drive;
  const auto& s = rc.sim.spectrum;
  switch (solver) {
    case SolverTag::closed_form: return q_closed_form_series(d, s, grid);
    case SolverTag::ode_reduction: return q_ode(d, s, grid);
    case SolverTag::pseudomode: return q_pseudomode(d, s, grid);
    case SolverTag::volterra: break;
  }
  const double t_final = grid.back();
  if (t_final == 0.0) return q_volterra(d, s, 0.0, rc.volterra_step);
  const double dt = t_final / rc.sim.n_steps;
  const auto per_cell = static_cast<long long>(std::ceil(dt / rc.volterra_step - 1e-9));
  const AmplitudeSeries fine = q_volterra(d, s, t_final, dt / static_cast<double>(per_cell));
  if (fine.size() != static_cast<std::size_t>(per_cell * rc.sim.n_steps + 1))
    throw std::logic_error("Volterra grid is not aligned with the output grid");
  AmplitudeSeries out{grid, {}, SolverTag::volterra};
  for (std::size_t i = 0; i < grid.size(); ++i) out.values.push_back(fine.values[i * per_cell]);
  return out;
}

/// q at a single time from the selected solver.
inline complex q_at(const RunConfig& rc, double t) {
  const auto& d = rc.sim.drive;
  const auto& s = rc.sim.spectrum;
  const std::vector<double> grid{0.0, t};
  switch (rc.solver) {
    case SolverTag::closed_form: return q_closed_form(d, s, t);
    case SolverTag::ode_reduction: return q_ode(d, s, grid).values.back();
    case SolverTag::pseudomode: return q_pseudomode(d, s, grid).values.back();
    case SolverTag::volterra: break;
  }
  if (t == 0.0) return 1.0;
  return q_volterra(d, s, t, std::min(rc.volterra_step, t)).values.back();
}

/// Step actually used by solve_amplitude for the Volterra solver.
inline double volterra_effective_step(const RunConfig& rc) {
  if (rc.sim.t_final == 0.0) return rc.volterra_step;
  const double dt = rc.sim.t_final / rc.sim.n_steps;
  return dt / std::ceil(dt / rc.volterra_step - 1e-9);
}

inline double max_deviation(const AmplitudeSeries& a, const AmplitudeSeries& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  return worst;
}

}  // namespace detail

inline int cmd_trajectory(const RunConfig& rc, std::ostream& log, std::ostream& err) {
  const std::vector<double> grid = uniform_grid(rc.sim.t_final, rc.sim.n_steps);
  const AmplitudeSeries series = detail::solve_amplitude(rc, rc.solver, grid);
  const std::vector<DensityMatrix> states = trajectory(rc.sim.initial_state, rc.sim.drive, series);

  std::filesystem::create_directories(rc.out_dir);
  const auto path = rc.out_dir / "trajectory.csv";
  auto f = detail::open_out(path);
  f << "# qsync trajectory\n# solver = " << to_string(series.solver) << '\n';
  detail::write_param_comments(f, rc.sim.drive, rc.sim.spectrum);
  f << "# phi = " << io::format_double(rc.phi) << '\n';
  f << "t,re_q,im_q,abs_q,rho_gg,re_rho_ge,im_rho_ge,s_phi,max_s,phi_star\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const complex q = series.values[i];
    const DensityMatrix& rho = states[i];
    const SyncValue m = max_s(rho);
    io::write_csv_row(f, {grid[i], q.real(), q.imag(), std::abs(q), rho.rho_gg(), rho.rho_ge().real(),
                          rho.rho_ge().imag(), s_measure(rho, rc.phi), m.s_of_phi, m.phi});
  }
  detail::finish(f, path);

  if (rc.solver == SolverTag::pseudomode) {
    const auto mpath = rc.out_dir / "memory.csv";
    auto mf = detail::open_out(mpath);
    mf << "t,pop_excited,pop_memory,p_lost\n";
    for (const auto& s : pseudomode_trajectory(rc.sim.drive, rc.sim.spectrum, grid))
      io::write_csv_row(mf, {s.time, std::norm(s.c_excited), s.memory_population(), s.p_lost});
    detail::finish(mf, mpath);
  }
  log << "wrote " << path.string() << " (" << grid.size() << " rows)\n";

  if (!rc.cross_check) return kOk;
  const AmplitudeSeries reference = q_closed_form_series(rc.sim.drive, rc.sim.spectrum, grid);
  const double h = detail::volterra_effective_step(rc);
  struct Check {
    SolverTag solver;
    double tol;
  };
  const Check checks[] = {{SolverTag::ode_reduction, 1e-8},
                          {SolverTag::pseudomode, 1e-7},
                          {SolverTag::volterra, std::min(1e-3, 100.0 * h * h)}};
  bool ok = true;
  for (const Check& c : checks) {
    const double dev = detail::max_deviation(reference, detail::solve_amplitude(rc, c.solver, grid));
    const bool pass = dev <= c.tol;
    ok = ok && pass;
    (pass ? log : err) << "cross-check " << to_string(c.solver) << ": max |dq| = " << dev
                       << " (tol " << c.tol << ")" << (pass ? "" : " FAILED") << '\n';
  }
  return ok ? kOk : kCrossCheckFailed;
}

inline int cmd_qmap(const RunConfig& rc, std::ostream& log, std::ostream&) {
  std::filesystem::create_directories(rc.out_dir);
  std::vector<double> times = rc.snapshot_times;
  std::sort(times.begin(), times.end());
  const DressedAngles angles = derive_dressed(rc.sim.drive);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    const DensityMatrix rho = evolve_with_q(rc.sim.initial_state, angles, detail::q_at(rc, t));
    const QGrid q = husimi_grid(rho, rc.q_theta_points, rc.q_phi_points);
    const std::string stem = "qmap_" + std::to_string(k);

    const auto path = rc.out_dir / (stem + ".csv");
    auto f = detail::open_out(path);
    f << "# qsync husimi map\n# t = " << io::format_double(t) << '\n';
    detail::write_param_comments(f, rc.sim.drive, rc.sim.spectrum);
    f << "theta,phi,q\n";
    for (std::size_t i = 0; i < q.thetas.size(); ++i)
      for (std::size_t j = 0; j < q.phis.size(); ++j)
        io::write_csv_row(f, {q.thetas[i], q.phis[j], q.at(i, j)});
    detail::finish(f, path);

    if (rc.heatmap) {
      const auto ipath = rc.out_dir / (stem + ".pgm");
      auto img = detail::open_out(ipath, true);
      io::write_pgm(img, static_cast<int>(q.phis.size()), static_cast<int>(q.thetas.size()),
                    io::to_gray(q.values));
      detail::finish(img, ipath);
    }
    const SyncValue m = max_s(rho);
    log << "t = " << t << ": " << path.string() << ", max S = " << m.s_of_phi
        << " at phi* = " << m.phi << '\n';
  }
  return kOk;
}

/// Writes the sweep grid as `# key = value` metadata, a header and x,y,value rows.
inline void write_sweep_csv(std::ostream& f, const SweepGrid& g) {
  const SweepSpec& s = g.spec;
  f << "# qsync sweep\n";
  for (const auto& [prefix, axis] : {std::pair{"x", &s.x}, std::pair{"y", &s.y}}) {
    f << "# " << prefix << "_param = " << to_string(axis->param) << '\n'
      << "# " << prefix << "_min = " << io::format_double(axis->min) << '\n'
      << "# " << prefix << "_max = " << io::format_double(axis->max) << '\n'
      << "# " << prefix << "_n = " << axis->n << '\n';
  }
  detail::write_param_comments(f, s.drive, s.spectrum);
  f << "# rho_gg = " << io::format_double(s.initial_state.rho_gg()) << '\n'
    << "# rho_ge_re = " << io::format_double(s.initial_state.rho_ge().real()) << '\n'
    << "# rho_ge_im = " << io::format_double(s.initial_state.rho_ge().imag()) << '\n'
    << "# t_eval = " << io::format_double(s.t_eval) << '\n'
    << "# observable = " << to_string(s.observable) << '\n'
    << "# phi = " << io::format_double(s.phi) << '\n'
    << "# coupling_sweep_mode = " << to_string(s.coupling_mode) << '\n'
    << "# threshold = " << io::format_double(s.threshold) << '\n';
  f << "x,y,value\n";
  for (int iy = 0; iy < g.ny(); ++iy)
    for (int ix = 0; ix < g.nx(); ++ix) io::write_csv_row(f, {s.x.at(ix), s.y.at(iy), g.at(ix, iy)});
}

/// Inverse of write_sweep_csv (boundary and locked phases are not stored).
inline SweepGrid read_sweep_csv(std::istream& in) {
  const io::CsvTable t = io::read_csv(in);
  std::ostringstream meta;
  for (const auto& c : t.comments)
    if (c.find('=') != std::string::npos) meta << c << '\n';
  const RunConfig rc = build_run_config(io::parse_config(meta.str()));
  SweepGrid g{rc.sweep, {}, {}, {}, 0};
  const std::size_t col = t.column("value");
  for (const auto& row : t.rows) g.values.push_back(row.at(col));
  if (g.values.size() != static_cast<std::size_t>(g.nx()) * g.ny())
    throw std::runtime_error("sweep CSV row count does not match axes");
  for (double v : g.values)
    if (!std::isfinite(v)) ++g.nan_count;
  return g;
}

inline int cmd_sweep(const RunConfig& rc, std::ostream& log, std::ostream& err) {
  const SweepGrid g = run_sweep(rc.sweep, rc.workers);
  std::filesystem::create_directories(rc.out_dir);

  const auto path = rc.out_dir / "sweep.csv";
  auto f = detail::open_out(path);
  write_sweep_csv(f, g);
  detail::finish(f, path);

  const auto bpath = rc.out_dir / "boundary.csv";
  auto bf = detail::open_out(bpath);
  bf << "x,y\n";
  for (const Point2& p : g.boundary) io::write_csv_row(bf, {p.x, p.y});
  detail::finish(bf, bpath);

  if (rc.heatmap) {
    // image row 0 is the largest y
    std::vector<double> flipped;
    flipped.reserve(g.values.size());
    for (int iy = g.ny() - 1; iy >= 0; --iy)
      for (int ix = 0; ix < g.nx(); ++ix) flipped.push_back(g.at(ix, iy));
    const std::vector<std::uint8_t> gray = io::to_gray(flipped);

    const auto gpath = rc.out_dir / "sweep.pgm";
    auto gimg = detail::open_out(gpath, true);
    io::write_pgm(gimg, g.nx(), g.ny(), gray);
    detail::finish(gimg, gpath);

    std::vector<io::Rgb> rgb;
    rgb.reserve(gray.size());
    for (std::uint8_t v : gray) rgb.push_back(io::colormap(v));
    for (const Point2& p : g.boundary) {
      const auto ix = std::lround((p.x - g.spec.x.min) / g.spec.x.cell_width());
      const auto iy = std::lround((p.y - g.spec.y.min) / g.spec.y.cell_width());
      if (ix < 0 || ix >= g.nx() || iy < 0 || iy >= g.ny()) continue;
      rgb[static_cast<std::size_t>(g.ny() - 1 - iy) * g.nx() + ix] = {255, 255, 255};
    }
    const auto cpath = rc.out_dir / "sweep.ppm";
    auto cimg = detail::open_out(cpath, true);
    io::write_ppm(cimg, g.nx(), g.ny(), rgb);
    detail::finish(cimg, cpath);
  }

  log << "wrote " << path.string() << " (" << g.values.size() << " cells, " << g.boundary.size()
      << " boundary points)\n";
  if (g.spec.x.param == SweepParam::delta_spec && g.nan_count == 0) {
    try {
      log << "tongue_center = " << tongue_center(g) << " (predicted "
          << resonant_delta_spec(g.spec.drive) << ")\n";
    } catch (const std::runtime_error&) {
      log << "tongue_center: no tongue interior found\n";
    }
  }
  if (g.nan_count > 0) {
    err << "sweep: " << g.nan_count << " of " << g.values.size()
        << " cells failed parameter validation (written as nan)\n";
    return kConfigError;
  }
  return kOk;
}

/// Full CLI entry point; returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& log = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Driven two-level system in a Lorentzian bath: synchronisation dynamics"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key = value config file");

  std::map<std::string, std::string> overrides;
  bool cross_check_flag = false;
  for (const std::string& key : known_keys()) {
    std::string names = "--" + key;
    if (key.find('_') != std::string::npos) {
      std::string hyphen = key;
      std::replace(hyphen.begin(), hyphen.end(), '_', '-');
      names = "--" + hyphen + "," + names;
    }
    if (key == "cross_check")
      app.add_flag(names, cross_check_flag, "compare every solver against the closed form");
    else
      app.add_option(names, overrides[key], "override config key " + key);
  }
  auto* traj = app.add_subcommand("trajectory", "q(t), rho(t) and S(phi, t) over a time grid");
  auto* qmap = app.add_subcommand("qmap", "Husimi Q maps at snapshot times");
  auto* sweep = app.add_subcommand("sweep", "two-parameter max-S phase diagram");
  for (auto* sub : {traj, qmap, sweep}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, log, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, log, err);
    return kConfigError;
  }

  try {
    io::KeyValues kv;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        err << "cannot read config " << config_path << '\n';
        return kConfigError;
      }
      kv = io::parse_config(in);
    }
    for (const std::string& key : known_keys()) {
      if (key == "cross_check") continue;
      std::string hyphen = key;
      std::replace(hyphen.begin(), hyphen.end(), '_', '-');
      const CLI::Option* opt = app.get_option("--" + (key.find('_') != std::string::npos ? hyphen : key));
      if (opt->count() > 0) kv.set(key, overrides[key]);
    }
    if (cross_check_flag) kv.set("cross_check", "true");

    const RunConfig rc = build_run_config(kv);
    if (traj->parsed()) return cmd_trajectory(rc, log, err);
    if (qmap->parsed()) return cmd_qmap(rc, log, err);
    return cmd_sweep(rc, log, err);
  } catch (const io::ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoError;
  }
}

}  // namespace qsync::cli
