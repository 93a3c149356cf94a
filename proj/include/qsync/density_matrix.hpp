#pragma once

// Two-level density matrix in the {|g>, |e>} basis: index 0 is |g>, index 1 is
// |e>, and the stored coherence is rho_ge = <g|rho|e>. Trace is fixed at 1 and
// Hermiticity holds by representation.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qsync/model_params.hpp"

namespace qsync {

inline constexpr double kPositivityTolerance = 1e-9;

class DensityMatrix {
 public:
  constexpr DensityMatrix() = default;

  /// Validating constructor; rejects states outside the Bloch ball by more
  /// than `tol`.
  static DensityMatrix from_components(double rho_gg, complex rho_ge,
                                       double tol = kPositivityTolerance) {
    DensityMatrix rho(rho_gg, rho_ge);
    if (!std::isfinite(rho_gg) || !std::isfinite(rho_ge.real()) ||
        !std::isfinite(rho_ge.imag()))
      throw std::invalid_argument("density matrix entries must be finite");
    if (const double v = rho.positivity_violation(); v > tol)
      throw std::invalid_argument("density matrix is not positive (violation " +
                                  std::to_string(v) + ")");
    return rho;
  }

  /// Unchecked construction, for channel outputs and linear combinations.
  static constexpr DensityMatrix unchecked(double rho_gg, complex rho_ge) {
    return DensityMatrix(rho_gg, rho_ge);
  }

  /// (|g> + |e>)/sqrt(2)
  static constexpr DensityMatrix plus_state() { return DensityMatrix(0.5, complex(0.5, 0.0)); }
  static constexpr DensityMatrix maximally_mixed() { return DensityMatrix(0.5, complex(0.0, 0.0)); }
  static constexpr DensityMatrix ground() { return DensityMatrix(1.0, complex(0.0, 0.0)); }
  static constexpr DensityMatrix excited() { return DensityMatrix(0.0, complex(0.0, 0.0)); }

  /// |G><G| with |G> = cos(eta/2)|g> - sin(eta/2)|e>, the dressed ground
  /// state and the fixed point of the decay channel.
  static DensityMatrix dressed_ground(const DressedAngles& d) {
    const double c = d.cos_half(), s = d.sin_half();
    return DensityMatrix(c * c, complex(-c * s, 0.0));
  }

  /// Pure state from Bloch angles: polar angle measured from |e>.
  static DensityMatrix pure(double theta, double phi) {
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    // |psi> = cos(theta/2)|e> + sin(theta/2) e^{i phi}|g>
    return DensityMatrix(s * s, s * c * std::polar(1.0, phi));
  }

  constexpr double rho_gg() const { return rho_gg_; }
  constexpr double rho_ee() const { return 1.0 - rho_gg_; }
  constexpr complex rho_ge() const { return rho_ge_; }
  constexpr complex rho_eg() const { return std::conj(rho_ge_); }
  constexpr double trace() const { return rho_gg_ + rho_ee(); }

  /// How far the state sits outside the physical set; <= 0 when physical.
  double positivity_violation() const {
    const double pop = std::max(-rho_gg_, rho_gg_ - 1.0);
    const double coh = std::norm(rho_ge_) - rho_gg_ * (1.0 - rho_gg_);
    return std::max(pop, coh);
  }

  /// Convex (or general affine) combination a*this + (1-a)*other.
  constexpr DensityMatrix mix(double a, const DensityMatrix& other) const {
    return DensityMatrix(a * rho_gg_ + (1.0 - a) * other.rho_gg_,
                         a * rho_ge_ + (1.0 - a) * other.rho_ge_);
  }

  friend constexpr bool operator==(const DensityMatrix&, const DensityMatrix&) = default;

 private:
  constexpr DensityMatrix(double gg, complex ge) : rho_gg_(gg), rho_ge_(ge) {}

  double rho_gg_ = 1.0;
  complex rho_ge_{0.0, 0.0};
};

/// Everything needed to run one trajectory.
struct SimConfig {
  DriveParams drive;
  SpectrumParams spectrum;
  double t_final = 100.0;
  int n_steps = 1000;
  DensityMatrix initial_state = DensityMatrix::plus_state();

  void validate() const {
    drive.validate();
    spectrum.validate();
    if (!std::isfinite(t_final) || t_final < 0.0)
      throw std::invalid_argument("t_final must be finite and >= 0");
    if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  }
};

}  // namespace qsync
