#pragma once

// Two-parameter phase diagrams of the synchronisation measure.
//
// Every cell evolves the initial state to t_eval with the exact channel and
// records one observable. Cells are independent, so the grid is filled by a
// pool of workers writing disjoint slots; the result does not depend on the
// worker count.

#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "qsync/density_matrix.hpp"
#include "qsync/dynamics_map.hpp"
#include "qsync/model_params.hpp"
#include "qsync/sync_measure.hpp"

namespace qsync {

enum class SweepParam { delta_spec, omega_rabi, gamma0, lambda_width };
enum class Observable { max_s, s_at_phi, phi_star };

/// How a gamma0 axis treats the spectral width.
///  absolute: lambda stays at its fixed value while the coupling varies.
///  tied:     lambda = (lambda/gamma0 of the fixed config) * coupling.
enum class CouplingMode { absolute, tied };

inline std::string_view to_string(SweepParam p) {
  switch (p) {
    case SweepParam::delta_spec: return "delta_spec";
    case SweepParam::omega_rabi: return "omega_rabi";
    case SweepParam::gamma0: return "gamma0";
    case SweepParam::lambda_width: return "lambda";
  }
  return "?";
}

inline std::optional<SweepParam> parse_sweep_param(std::string_view s) {
  if (s == "delta_spec") return SweepParam::delta_spec;
  if (s == "omega_rabi") return SweepParam::omega_rabi;
  if (s == "gamma0") return SweepParam::gamma0;
  if (s == "lambda" || s == "lambda_width") return SweepParam::lambda_width;
  return std::nullopt;
}

inline std::string_view to_string(Observable o) {
  switch (o) {
    case Observable::max_s: return "max_s";
    case Observable::s_at_phi: return "s_at_phi";
    case Observable::phi_star: return "phi_star";
  }
  return "?";
}

inline std::optional<Observable> parse_observable(std::string_view s) {
  if (s == "max_s") return Observable::max_s;
  if (s == "s_at_phi") return Observable::s_at_phi;
  if (s == "phi_star") return Observable::phi_star;
  return std::nullopt;
}

inline std::string_view to_string(CouplingMode m) {
  return m == CouplingMode::absolute ? "absolute" : "tied";
}

inline std::optional<CouplingMode> parse_coupling_mode(std::string_view s) {
  if (s == "absolute") return CouplingMode::absolute;
  if (s == "tied") return CouplingMode::tied;
  return std::nullopt;
}

struct Axis {
  SweepParam param = SweepParam::delta_spec;
  double min = 0.0;
  double max = 1.0;
  int n = 2;

  double at(int i) const { return min + (max - min) * static_cast<double>(i) / (n - 1); }
  double cell_width() const { return (max - min) / (n - 1); }
};

struct SweepSpec {
  Axis x{SweepParam::delta_spec, -6.0, 2.0, 161};
  Axis y{SweepParam::gamma0, 0.1, 2.0, 96};
  DriveParams drive{1.0, 0.0};
  SpectrumParams spectrum{1.0, 0.1, 0.0};
  DensityMatrix initial_state = DensityMatrix::plus_state();
  double t_eval = 100.0;
  Observable observable = Observable::max_s;
  double phi = 0.0;  // used by s_at_phi
  CouplingMode coupling_mode = CouplingMode::absolute;
  double threshold = 1e-3;

  void validate() const {
    for (const Axis* a : {&x, &y}) {
      if (a->n < 2) throw std::invalid_argument("sweep axes need n >= 2");
      if (!std::isfinite(a->min) || !std::isfinite(a->max))
        throw std::invalid_argument("sweep axis bounds must be finite");
    }
    if (x.param == y.param)
      throw std::invalid_argument("sweep axes alias the same parameter (" +
                                  std::string(to_string(x.param)) + ")");
    if (coupling_mode == CouplingMode::tied &&
        (x.param == SweepParam::lambda_width || y.param == SweepParam::lambda_width) &&
        (x.param == SweepParam::gamma0 || y.param == SweepParam::gamma0))
      throw std::invalid_argument("tied coupling mode cannot sweep lambda and gamma0 together");
    if (!std::isfinite(t_eval) || t_eval < 0.0) throw std::invalid_argument("t_eval must be >= 0");
    if (!std::isfinite(threshold)) throw std::invalid_argument("threshold must be finite");
    if (initial_state.positivity_violation() > kPositivityTolerance)
      throw std::invalid_argument("sweep initial state is not a valid density matrix");
  }
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct SweepGrid {
  SweepSpec spec;
  std::vector<double> values;        // n_y rows of n_x, row-major
  std::vector<double> locked_phase;  // phi* per cell, always recorded
  std::vector<Point2> boundary;
  std::size_t nan_count = 0;

  int nx() const { return spec.x.n; }
  int ny() const { return spec.y.n; }
  double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * nx() + ix]; }
  double phase_at(int ix, int iy) const {
    return locked_phase[static_cast<std::size_t>(iy) * nx() + ix];
  }
};

namespace detail {

inline void assign_param(DriveParams& drive, SpectrumParams& spectrum, SweepParam p, double v,
                         CouplingMode mode, double lambda_per_gamma) {
  switch (p) {
    case SweepParam::delta_spec: spectrum.delta_spec = v; break;
    case SweepParam::omega_rabi: drive.omega_rabi = v; break;
    case SweepParam::lambda_width: spectrum.lambda_width = v; break;
    case SweepParam::gamma0:
      spectrum.gamma0 = v;
      if (mode == CouplingMode::tied) spectrum.lambda_width = lambda_per_gamma * v;
      break;
  }
}

struct CellResult {
  double value;
  double phase;
};

inline CellResult evaluate_cell(const SweepSpec& spec, int ix, int iy) {
  DriveParams drive = spec.drive;
  SpectrumParams spectrum = spec.spectrum;
  const double ratio = spec.spectrum.lambda_width / spec.spectrum.gamma0;
  assign_param(drive, spectrum, spec.x.param, spec.x.at(ix), spec.coupling_mode, ratio);
  assign_param(drive, spectrum, spec.y.param, spec.y.at(iy), spec.coupling_mode, ratio);
  try {
    const DensityMatrix rho = evolve(spec.initial_state, drive, spectrum, spec.t_eval);
    const SyncValue m = max_s(rho);
    double v = 0.0;
    switch (spec.observable) {
      case Observable::max_s: v = m.s_of_phi; break;
      case Observable::s_at_phi: v = s_measure(rho, spec.phi); break;
      case Observable::phi_star: v = m.phi; break;
    }
    return {v, m.phi};
  } catch (const std::invalid_argument&) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
}

}  // namespace detail

/// Level-set points where the observable crosses `threshold`, linearly
/// interpolated along grid edges (x-edges row by row, then y-edges).
inline std::vector<Point2> extract_boundary(const SweepGrid& grid, double threshold = 1e-3) {
  std::vector<Point2> pts;
  auto crosses = [&](double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b)) return false;
    return (a < threshold && b >= threshold) || (a >= threshold && b < threshold);
  };
  auto frac = [&](double a, double b) { return (threshold - a) / (b - a); };
  const Axis& ax = grid.spec.x;
  const Axis& ay = grid.spec.y;
  for (int iy = 0; iy < grid.ny(); ++iy)
    for (int ix = 0; ix + 1 < grid.nx(); ++ix) {
      const double a = grid.at(ix, iy), b = grid.at(ix + 1, iy);
      if (crosses(a, b)) pts.push_back({ax.at(ix) + frac(a, b) * ax.cell_width(), ay.at(iy)});
    }
  for (int ix = 0; ix < grid.nx(); ++ix)
    for (int iy = 0; iy + 1 < grid.ny(); ++iy) {
      const double a = grid.at(ix, iy), b = grid.at(ix, iy + 1);
      if (crosses(a, b)) pts.push_back({ax.at(ix), ay.at(iy) + frac(a, b) * ay.cell_width()});
    }
  return pts;
}

inline SweepGrid run_sweep(const SweepSpec& spec, unsigned workers = 1) {
  spec.validate();
  SweepGrid grid{spec, {}, {}, {}, 0};
  const std::size_t cells = static_cast<std::size_t>(spec.x.n) * spec.y.n;
  grid.values.assign(cells, 0.0);
  grid.locked_phase.assign(cells, 0.0);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c = next.fetch_add(1); c < cells; c = next.fetch_add(1)) {
      const int ix = static_cast<int>(c % spec.x.n);
      const int iy = static_cast<int>(c / spec.x.n);
      const detail::CellResult r = detail::evaluate_cell(spec, ix, iy);
      grid.values[c] = r.value;
      grid.locked_phase[c] = r.phase;
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  for (double v : grid.values)
    if (!std::isfinite(v)) ++grid.nan_count;
  grid.boundary = extract_boundary(grid, spec.threshold);
  return grid;
}

struct SliceHollowing {
  double y = 0.0;
  bool hollowed = false;
  double dip_x = std::numeric_limits<double>::quiet_NaN();  // location of the deepest interior dip
};

/// Per y-slice: does some cell fall below `dip_level` while cells on both
/// sides of it exceed `flank_level`? That is a locked region on each side of
/// an unsynchronised boundary.
inline std::vector<SliceHollowing> analyze_hollowing(const SweepGrid& grid, double dip_level,
                                                     double flank_level) {
  std::vector<SliceHollowing> out;
  out.reserve(grid.ny());
  for (int iy = 0; iy < grid.ny(); ++iy) {
    SliceHollowing s{grid.spec.y.at(iy), false, std::numeric_limits<double>::quiet_NaN()};
    // running max from the left, suffix max from the right
    std::vector<double> suffix(grid.nx() + 1, -std::numeric_limits<double>::infinity());
    for (int ix = grid.nx() - 1; ix >= 0; --ix) {
      const double v = grid.at(ix, iy);
      suffix[ix] = std::max(suffix[ix + 1], std::isfinite(v) ? v : suffix[ix + 1]);
    }
    double left = -std::numeric_limits<double>::infinity();
    double deepest = std::numeric_limits<double>::infinity();
    for (int ix = 0; ix < grid.nx(); ++ix) {
      const double v = grid.at(ix, iy);
      if (std::isfinite(v) && v < dip_level && left > flank_level && suffix[ix + 1] > flank_level &&
          v < deepest) {
        deepest = v;
        s.hollowed = true;
        s.dip_x = grid.spec.x.at(ix);
      }
      if (std::isfinite(v)) left = std::max(left, v);
    }
    out.push_back(s);
  }
  return out;
}

/// Centre of the synchronisation tongue along a delta_spec axis.
///
/// The tongue interior is taken, per y-slice, as the longest run of cells
/// locked near the phase pi of the relaxed dressed ground state; the argmax
/// of the observable in that run is averaged over all slices that have one.
inline double tongue_center(const SweepGrid& grid) {
  if (grid.spec.x.param != SweepParam::delta_spec)
    throw std::invalid_argument("tongue_center needs delta_spec on the x axis");
  double sum = 0.0;
  int slices = 0;
  for (int iy = 0; iy < grid.ny(); ++iy) {
    auto interior = [&](int ix) {
      const double ph = grid.phase_at(ix, iy);
      return std::isfinite(grid.at(ix, iy)) && std::isfinite(ph) && std::cos(ph) < 0.0;
    };
    int best_start = -1, best_len = 0;
    for (int ix = 0; ix < grid.nx();) {
      if (!interior(ix)) {
        ++ix;
        continue;
      }
      int end = ix;
      while (end < grid.nx() && interior(end)) ++end;
      if (end - ix > best_len) {
        best_len = end - ix;
        best_start = ix;
      }
      ix = end;
    }
    if (best_start < 0) continue;
    int arg = best_start;
    for (int ix = best_start; ix < best_start + best_len; ++ix)
      if (grid.at(ix, iy) > grid.at(arg, iy)) arg = ix;
    sum += grid.spec.x.at(arg);
    ++slices;
  }
  if (slices == 0) throw std::runtime_error("no tongue interior found in sweep grid");
  return sum / slices;
}

inline double tongue_center(const SweepSpec& spec, unsigned workers = 1) {
  if (spec.x.param != SweepParam::delta_spec)
    throw std::invalid_argument("tongue_center needs delta_spec on the x axis");
  SweepSpec s = spec;
  s.observable = Observable::max_s;
  return tongue_center(run_sweep(s, workers));
}

}  // namespace qsync
