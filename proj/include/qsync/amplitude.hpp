#pragma once

// Survival amplitude q(t) of the excited dressed state |E> coupled to the
// Lorentzian bath. q obeys
//
//   q'(t) = -cos^4(eta/2) * int_0^t f(t - s) q(s) ds,   f(s) = (gamma0 lambda / 2) e^{-K s}
//
// and is computed three independent ways: the closed form of the equivalent
// damped oscillator q'' + K q' + cos^4(eta/2) (gamma0 lambda/2) q = 0, a direct
// Volterra quadrature of the integro-differential equation, and RK4 on the
// exactly equivalent two-variable linear system.

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsync/model_params.hpp"
#include "qsync/rk4.hpp"

namespace qsync {

enum class SolverTag { closed_form, volterra, ode_reduction, pseudomode };

inline const char* to_string(SolverTag tag) {
  switch (tag) {
    case SolverTag::closed_form: return "closed_form";
    case SolverTag::volterra: return "volterra";
    case SolverTag::ode_reduction: return "ode";
    case SolverTag::pseudomode: return "pseudomode";
  }
  return "unknown";
}

struct AmplitudeSeries {
  std::vector<double> times;
  std::vector<complex> values;
  SolverTag solver = SolverTag::closed_form;

  std::size_t size() const { return times.size(); }
};

/// Product cos^4(eta/2) * gamma0 * lambda / 2 that multiplies the kernel.
inline double effective_kernel_strength(const DriveParams& drive, const SpectrumParams& spectrum) {
  return derive_dressed(drive).coupling_factor() * kernel_amplitude(spectrum);
}

/// Gamma = sqrt(4K^2 - 2 gamma0 lambda (1 + cos eta)^2), principal branch.
inline complex gamma_rate(const DriveParams& drive, const SpectrumParams& spectrum) {
  const complex k = kernel_rate(drive, spectrum).k_complex;
  const double one_plus_cos = 1.0 + std::cos(derive_dressed(drive).eta);
  return std::sqrt(4.0 * k * k -
                   2.0 * spectrum.gamma0 * spectrum.lambda_width * one_plus_cos * one_plus_cos);
}

inline void validate_time_grid(std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("time grid is empty");
  if (!(grid.front() >= 0.0))
    throw std::invalid_argument("time grid must be non-negative");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] >= grid[i - 1]))
      throw std::invalid_argument("time grid is not sorted at index " + std::to_string(i));
  if (!std::isfinite(grid.back())) throw std::invalid_argument("time grid must be finite");
}

/// Uniform grid 0, dt, ..., t_final with n_steps intervals.
inline std::vector<double> uniform_grid(double t_final, int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (!(t_final >= 0.0)) throw std::invalid_argument("t_final must be >= 0");
  std::vector<double> grid(static_cast<std::size_t>(n_steps) + 1);
  for (int i = 0; i <= n_steps; ++i) grid[i] = t_final * i / n_steps;
  return grid;
}

namespace detail {

// sinh(x)/x, with a power series near the origin.
inline complex sinhc(complex x) {
  if (std::abs(x) > 0.5) return std::sinh(x) / x;
  const complex x2 = x * x;
  complex term = 1.0, sum = 1.0;
  for (int k = 1; k < 12; ++k) {
    term *= x2 / static_cast<double>((2 * k) * (2 * k + 1));
    sum += term;
  }
  return sum;
}

/// Literal closed form for a caller-chosen branch of Gamma. No overflow
/// guarding; used to check branch invariance.
inline complex closed_form_literal(complex k, complex gamma, double t) {
  const complex x = 0.25 * gamma * t;
  return std::exp(-0.5 * k * t) * (std::cosh(x) + 0.5 * k * t * sinhc(x));
}

}  // namespace detail

/// q(t) = e^{-Kt/2} [cosh(Gamma t/4) + (2K/Gamma) sinh(Gamma t/4)].
inline complex q_closed_form(const DriveParams& drive, const SpectrumParams& spectrum, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
  if (t == 0.0) return 1.0;
  const complex k = kernel_rate(drive, spectrum).k_complex;
  const complex gamma = gamma_rate(drive, spectrum);  // Re(gamma) >= 0
  const complex x = 0.25 * gamma * t;
  if (std::abs(x) <= 1.0) return detail::closed_form_literal(k, gamma, t);
  // sum of the two decaying normal modes
  const complex ratio = 2.0 * k / gamma;
  const complex fast = -0.5 * k * t - x;
  const complex slow = -0.5 * k * t + x;
  return 0.5 * ((1.0 + ratio) * std::exp(slow) + (1.0 - ratio) * std::exp(fast));
}

inline AmplitudeSeries q_closed_form_series(const DriveParams& drive, const SpectrumParams& spectrum,
                                            std::span<const double> grid) {
  validate_time_grid(grid);
  AmplitudeSeries out{{grid.begin(), grid.end()}, {}, SolverTag::closed_form};
  out.values.reserve(grid.size());
  for (double t : grid) out.values.push_back(q_closed_form(drive, spectrum, t));
  return out;
}

namespace detail {

inline void validate_volterra_step(double t_final, double h) {
  if (!std::isfinite(t_final) || t_final < 0.0)
    throw std::invalid_argument("t_final must be finite and >= 0");
  if (!(h > 0.0)) throw std::invalid_argument("Volterra step must be > 0");
  if (h > t_final) throw std::invalid_argument("Volterra step exceeds t_final");
}

// Number of intervals; the effective step t_final/n never exceeds h.
inline long long volterra_intervals(double t_final, double h) {
  return static_cast<long long>(std::ceil(t_final / h - 1e-9));
}

}  // namespace detail

/// Volterra solver: trapezoidal history integral inside a Heun
/// predictor-corrector. The exponential kernel lets the history sum be
/// carried forward by a one-step recurrence, so the cost is O(n).
inline AmplitudeSeries q_volterra(const DriveParams& drive, const SpectrumParams& spectrum,
                                  double t_final, double h) {
  drive.validate();
  spectrum.validate();
  AmplitudeSeries out{{0.0}, {complex(1.0)}, SolverTag::volterra};
  if (t_final == 0.0) return out;
  detail::validate_volterra_step(t_final, h);

  const long long n = detail::volterra_intervals(t_final, h);
  const double step = t_final / static_cast<double>(n);
  const double c4 = derive_dressed(drive).coupling_factor();
  const double f0 = kernel_amplitude(spectrum);
  const complex decay = std::exp(-kernel_rate(drive, spectrum).k_complex * step);

  out.times.reserve(n + 1);
  out.values.reserve(n + 1);
  complex q = 1.0;
  complex history = 0.0;  // trapezoid of f(t_n - s) q(s) over [0, t_n]
  for (long long i = 0; i < n; ++i) {
    const complex slope = -c4 * history;
    // history carried to t_{n+1}, still missing the new endpoint
    const complex carried = decay * (history + 0.5 * step * f0 * q);
    const complex q_pred = q + step * slope;
    const complex slope_pred = -c4 * (carried + 0.5 * step * f0 * q_pred);
    q += 0.5 * step * (slope + slope_pred);
    history = carried + 0.5 * step * f0 * q;
    out.times.push_back(step * static_cast<double>(i + 1));
    out.values.push_back(q);
  }
  out.times.back() = t_final;
  return out;
}

/// Same scheme with the history integral re-summed from scratch at every
/// step. O(n^2); the most literal discretisation, kept as a test oracle.
inline AmplitudeSeries q_volterra_naive(const DriveParams& drive, const SpectrumParams& spectrum,
                                        double t_final, double h) {
  drive.validate();
  spectrum.validate();
  AmplitudeSeries out{{0.0}, {complex(1.0)}, SolverTag::volterra};
  if (t_final == 0.0) return out;
  detail::validate_volterra_step(t_final, h);

  const long long n = detail::volterra_intervals(t_final, h);
  const double step = t_final / static_cast<double>(n);
  const double c4 = derive_dressed(drive).coupling_factor();
  const double f0 = kernel_amplitude(spectrum);
  const complex k = kernel_rate(drive, spectrum).k_complex;
  auto kernel = [&](double s) { return f0 * std::exp(-k * s); };

  // trapezoid over nodes 0..m, with the value at node m supplied explicitly
  auto history_at = [&](long long m, complex q_last) {
    const double tm = step * static_cast<double>(m);
    if (m == 0) return complex(0.0);
    complex sum = 0.5 * kernel(tm) * out.values[0];
    for (long long j = 1; j < m; ++j) sum += kernel(tm - step * j) * out.values[j];
    sum += 0.5 * kernel(0.0) * q_last;
    return step * sum;
  };

  for (long long i = 0; i < n; ++i) {
    const complex q = out.values[i];
    const complex slope = -c4 * history_at(i, q);
    const complex q_pred = q + step * slope;
    const complex slope_pred = -c4 * history_at(i + 1, q_pred);
    out.times.push_back(step * static_cast<double>(i + 1));
    out.values.push_back(q + 0.5 * step * (slope + slope_pred));
  }
  out.times.back() = t_final;
  return out;
}

/// RK4 substep used by the ODE reductions: min(0.005, 0.05/|K|). Half of
/// the coarsest step that still holds 1e-8 agreement over t in [0, 100].
inline double default_ode_step(const KernelRate& k) {
  const double mag = std::abs(k.k_complex);
  const double cap = 0.005;
  return mag > 0.0 ? std::min(cap, 0.05 / mag) : cap;
}

/// RK4 on q' = -cos^4(eta/2) z, z' = (gamma0 lambda/2) q - K z, q(0)=1, z(0)=0.
inline AmplitudeSeries q_ode(const DriveParams& drive, const SpectrumParams& spectrum,
                             std::span<const double> grid, double max_step = 0.0) {
  drive.validate();
  spectrum.validate();
  validate_time_grid(grid);
  const KernelRate k = kernel_rate(drive, spectrum);
  if (max_step <= 0.0) max_step = default_ode_step(k);
  const double c4 = derive_dressed(drive).coupling_factor();
  const double f0 = kernel_amplitude(spectrum);
  auto rhs = [&](const CState<2>& y) {
    return CState<2>{-c4 * y[1], f0 * y[0] - k.k_complex * y[1]};
  };

  AmplitudeSeries out{{grid.begin(), grid.end()}, {}, SolverTag::ode_reduction};
  out.values.reserve(grid.size());
  CState<2> y{complex(1.0), complex(0.0)};
  double t = 0.0;
  for (double target : grid) {
    y = rk4_advance(y, t, target, max_step, rhs);
    t = target;
    out.values.push_back(y[0]);
  }
  return out;
}

}  // namespace qsync
