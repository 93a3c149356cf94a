#pragma once

// Phase-space synchronisation measures for a single qubit.
//
// Spin coherent states |theta, phi> = cos(theta/2)|e> + sin(theta/2) e^{i phi}|g>,
// Husimi Q = <theta,phi|rho|theta,phi> / 2pi, and the phase distribution
// S(phi) = int_0^pi sin(theta) Q dtheta - 1/2pi = Re(rho_ge e^{-i phi}) / 4.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qsync/density_matrix.hpp"

namespace qsync {

inline double husimi_q(const DensityMatrix& rho, double theta, double phi) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  const double coherence = (rho.rho_eg() * std::polar(1.0, phi)).real() * std::sin(theta);
  return (rho.rho_ee() * c * c + rho.rho_gg() * s * s + coherence) / (2.0 * std::numbers::pi);
}

/// Positive: phase locking toward phi. Negative: anti-phase locking.
inline double s_measure(const DensityMatrix& rho, double phi) {
  const complex ge = rho.rho_ge();
  return 0.25 * (ge.real() * std::cos(phi) + ge.imag() * std::sin(phi));
}

struct SyncValue {
  double s_of_phi = 0.0;
  double phi = 0.0;
  /// True when rho_ge == 0 and every phase is equally (un)preferred.
  bool degenerate = false;
};

/// max over phi of S(phi) = |rho_ge|/4, attained at phi* = arg(rho_ge).
inline SyncValue max_s(const DensityMatrix& rho) {
  const complex ge = rho.rho_ge();
  const double r = std::abs(ge);
  if (r == 0.0) return {0.0, 0.0, true};
  return {0.25 * r, std::arg(ge), false};
}

/// Husimi Q sampled on a regular (theta, phi) lattice; values are row-major
/// with theta as the slow index.
struct QGrid {
  std::vector<double> thetas;
  std::vector<double> phis;
  std::vector<double> values;

  double at(std::size_t i_theta, std::size_t i_phi) const {
    return values[i_theta * phis.size() + i_phi];
  }
};

namespace detail {

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

}  // namespace detail

/// Default lattice is 1 degree on both angles.
inline QGrid husimi_grid(const DensityMatrix& rho, std::size_t n_theta = 181,
                         std::size_t n_phi = 361) {
  if (n_theta < 2 || n_phi < 2) throw std::invalid_argument("Q grid needs >= 2 points per axis");
  QGrid g{detail::linspace(0.0, std::numbers::pi, n_theta),
          detail::linspace(-std::numbers::pi, std::numbers::pi, n_phi),
          {}};
  g.values.reserve(n_theta * n_phi);
  for (double th : g.thetas)
    for (double ph : g.phis) g.values.push_back(husimi_q(rho, th, ph));
  return g;
}

}  // namespace qsync
