#pragma once

// Physical parameters of a classically driven two-level system coupled to a
// zero-temperature Lorentzian bosonic environment.
//
// Units: every rate and frequency is expressed in units of the reference
// coupling gamma0 (default 1), every time in units of 1/gamma0.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qsync {

using complex = std::complex<double>;

/// Classical drive: Rabi frequency and drive detuning |w0 - wL|.
struct DriveParams {
  double omega_rabi = 0.0;
  double delta_drive = 0.0;

  void validate() const {
    if (!std::isfinite(omega_rabi) || omega_rabi < 0.0)
      throw std::invalid_argument("omega_rabi must be finite and >= 0, got " +
                                  std::to_string(omega_rabi));
    if (!std::isfinite(delta_drive) || delta_drive < 0.0)
      throw std::invalid_argument("delta_drive must be finite and >= 0, got " +
                                  std::to_string(delta_drive));
  }
};

enum class Regime { markovian, non_markovian, critical };

/// Lorentzian environment: coupling gamma0, width lambda, detuning
/// delta = w0 - wc between the TLS and the spectral centre.
struct SpectrumParams {
  double gamma0 = 1.0;
  double lambda_width = 1.0;
  double delta_spec = 0.0;

  void validate() const {
    if (!std::isfinite(gamma0) || gamma0 <= 0.0)
      throw std::invalid_argument("gamma0 must be finite and > 0, got " +
                                  std::to_string(gamma0));
    if (!std::isfinite(lambda_width) || lambda_width <= 0.0)
      throw std::invalid_argument("lambda must be finite and > 0, got " +
                                  std::to_string(lambda_width));
    if (!std::isfinite(delta_spec))
      throw std::invalid_argument("delta_spec must be finite");
  }

  /// Markovian iff gamma0 < lambda/2.
  Regime regime() const {
    const double half = 0.5 * lambda_width;
    if (gamma0 < half) return Regime::markovian;
    if (gamma0 > half) return Regime::non_markovian;
    return Regime::critical;
  }
};

struct DressedAngles {
  double eta = 0.0;            // mixing angle, in [0, pi/2]
  double omega_dressed = 0.0;  // sqrt(Delta^2 + 4 Omega^2)

  double cos_half() const { return std::cos(0.5 * eta); }
  double sin_half() const { return std::sin(0.5 * eta); }
  /// cos^4(eta/2): suppression of the dressed-state coupling to the bath.
  double coupling_factor() const {
    const double c2 = 0.5 * (1.0 + std::cos(eta));
    return c2 * c2;
  }
};

/// Complex decay rate of the exponential memory kernel.
struct KernelRate {
  complex k_complex;
};

inline DressedAngles derive_dressed(const DriveParams& drive) {
  // atan2 covers the resonant-drive case delta_drive = 0
  return {std::atan2(2.0 * drive.omega_rabi, drive.delta_drive),
          std::hypot(drive.delta_drive, 2.0 * drive.omega_rabi)};
}

/// K = lambda + i(Delta - delta - omega_D).
inline KernelRate kernel_rate(const DriveParams& drive, const SpectrumParams& spectrum) {
  const double omega_d = derive_dressed(drive).omega_dressed;
  return {complex(spectrum.lambda_width,
                  drive.delta_drive - spectrum.delta_spec - omega_d)};
}

/// Detuning between the dressed TLS and the discrete quasimode,
/// sqrt(Delta^2 + 4 Omega^2) - Delta + delta. Zero on the tongue centre.
inline double effective_detuning(const DriveParams& drive, const SpectrumParams& spectrum) {
  return derive_dressed(drive).omega_dressed - drive.delta_drive + spectrum.delta_spec;
}

/// delta at which the effective detuning vanishes.
inline double resonant_delta_spec(const DriveParams& drive) {
  return drive.delta_drive - derive_dressed(drive).omega_dressed;
}

/// Kernel amplitude f(0) = gamma0 * lambda / 2.
inline double kernel_amplitude(const SpectrumParams& spectrum) {
  return 0.5 * spectrum.gamma0 * spectrum.lambda_width;
}

}  // namespace qsync
