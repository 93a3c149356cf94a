#pragma once

// Classical fixed-step 4th-order Runge-Kutta for small complex linear systems.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace qsync {

template <std::size_t N>
using CState = std::array<std::complex<double>, N>;

namespace detail {

template <std::size_t N>
CState<N> axpy(const CState<N>& y, double a, const CState<N>& k) {
  CState<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + a * k[i];
  return out;
}

}  // namespace detail

/// One RK4 step of y' = f(y) (autonomous).
template <std::size_t N, class F>
CState<N> rk4_step(const CState<N>& y, double h, F&& f) {
  const CState<N> k1 = f(y);
  const CState<N> k2 = f(detail::axpy(y, 0.5 * h, k1));
  const CState<N> k3 = f(detail::axpy(y, 0.5 * h, k2));
  const CState<N> k4 = f(detail::axpy(y, h, k3));
  CState<N> out;
  for (std::size_t i = 0; i < N; ++i)
    out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
  return out;
}

/// Advance from t0 to t1 using equal substeps no longer than max_step.
template <std::size_t N, class F>
CState<N> rk4_advance(CState<N> y, double t0, double t1, double max_step, F&& f) {
  const double span = t1 - t0;
  if (span <= 0.0) return y;
  const auto n = static_cast<long long>(std::ceil(span / max_step - 1e-12));
  const double h = span / static_cast<double>(n > 0 ? n : 1);
  for (long long i = 0; i < (n > 0 ? n : 1); ++i) y = rk4_step(y, h, f);
  return y;
}

}  // namespace qsync
