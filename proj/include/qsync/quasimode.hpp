#pragma once

// Pseudomode picture of the Lorentzian bath: the dressed TLS exchanges its
// excitation with one damped discrete mode (the memory), which leaks into a
// flat continuum at rate kappa. In the single-excitation sector
//
//   c_E' = -i g c_D
//   c_D' = -i g c_E - (kappa/2 + i detuning) c_D
//   p_lost' = kappa |c_D|^2
//
// Eliminating c_D reproduces the exponential memory kernel exactly, so c_E(t)
// must equal q(t).

#include <cmath>
#include <span>
#include <vector>

#include "qsync/amplitude.hpp"
#include "qsync/model_params.hpp"
#include "qsync/rk4.hpp"

namespace qsync {

struct PseudomodeParams {
  double coupling_g = 0.0;    // cos^2(eta/2) sqrt(gamma0 lambda / 2)
  double decay_kappa = 0.0;   // 2 lambda
  double detuning_pm = 0.0;   // Delta - delta - omega_D = -Delta_eff

  /// kappa/2 + i*detuning, equal to the kernel rate K.
  complex rate() const { return {0.5 * decay_kappa, detuning_pm}; }
};

inline PseudomodeParams pseudomode_params(const DriveParams& drive, const SpectrumParams& spectrum) {
  const DressedAngles d = derive_dressed(drive);
  const double c2 = 0.5 * (1.0 + std::cos(d.eta));
  return {c2 * std::sqrt(kernel_amplitude(spectrum)), 2.0 * spectrum.lambda_width,
          -effective_detuning(drive, spectrum)};
}

struct PseudomodeState {
  double time = 0.0;
  complex c_excited{1.0, 0.0};
  complex c_mode{0.0, 0.0};
  double p_lost = 0.0;

  double memory_population() const { return std::norm(c_mode); }
  double norm_budget() const { return std::norm(c_excited) + std::norm(c_mode) + p_lost; }
};

inline std::vector<PseudomodeState> pseudomode_trajectory(const DriveParams& drive,
                                                          const SpectrumParams& spectrum,
                                                          std::span<const double> grid,
                                                          double max_step = 0.0) {
  drive.validate();
  spectrum.validate();
  validate_time_grid(grid);
  const PseudomodeParams pm = pseudomode_params(drive, spectrum);
  if (max_step <= 0.0) max_step = default_ode_step(KernelRate{pm.rate()});
  const complex i_g(0.0, pm.coupling_g);
  const complex rate = pm.rate();
  const double kappa = pm.decay_kappa;
  auto rhs = [&](const CState<3>& y) {
    return CState<3>{-i_g * y[1], -i_g * y[0] - rate * y[1], complex(kappa * std::norm(y[1]), 0.0)};
  };

  std::vector<PseudomodeState> out;
  out.reserve(grid.size());
  CState<3> y{complex(1.0), complex(0.0), complex(0.0)};
  double t = 0.0;
  for (double target : grid) {
    y = rk4_advance(y, t, target, max_step, rhs);
    t = target;
    out.push_back({target, y[0], y[1], y[2].real()});
  }
  return out;
}

/// c_E(t) from the pseudomode trajectory, as an amplitude series.
inline AmplitudeSeries q_pseudomode(const DriveParams& drive, const SpectrumParams& spectrum,
                                    std::span<const double> grid) {
  AmplitudeSeries out{{grid.begin(), grid.end()}, {}, SolverTag::pseudomode};
  for (const auto& s : pseudomode_trajectory(drive, spectrum, grid)) out.values.push_back(s.c_excited);
  return out;
}

}  // namespace qsync
