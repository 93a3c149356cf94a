#pragma once

// Test-only reference computations. Nothing here calls into the code paths it
// is used to check.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qsync/density_matrix.hpp"

namespace qsync::oracle {

/// Lab-basis unitary whose columns are |G>, |E> (index 0 = |g>, 1 = |e>).
inline Eigen::Matrix2cd dressed_basis(double eta) {
  const double c = std::cos(0.5 * eta), s = std::sin(0.5 * eta);
  Eigen::Matrix2cd v;
  // |G> = c|g> - s|e>,  |E> = s|g> + c|e>
  v << c, s, -s, c;
  return v;
}

inline Eigen::Matrix2cd to_matrix(const DensityMatrix& rho) {
  Eigen::Matrix2cd m;
  m << rho.rho_gg(), rho.rho_ge(), rho.rho_eg(), rho.rho_ee();
  return m;
}

/// Channel built from first principles: rotate into the dressed basis,
/// damp |E> -> |G> with amplitude q, rotate back.
inline Eigen::Matrix2cd dressed_route(const Eigen::Matrix2cd& rho, double eta, std::complex<double> q) {
  const Eigen::Matrix2cd v = dressed_basis(eta);
  Eigen::Matrix2cd d = v.adjoint() * rho * v;  // (0,0) = GG, (1,1) = EE
  Eigen::Matrix2cd out;
  const double q2 = std::norm(q);
  out(1, 1) = q2 * d(1, 1);
  out(0, 0) = d(0, 0) + (1.0 - q2) * d(1, 1);
  out(1, 0) = q * d(1, 0);             // <E|rho|G>
  out(0, 1) = std::conj(q) * d(0, 1);  // <G|rho|E>
  return v * out * v.adjoint();
}

/// Kraus operators of the same channel, lab basis.
inline std::vector<Eigen::Matrix2cd> kraus(double eta, std::complex<double> q) {
  const Eigen::Matrix2cd v = dressed_basis(eta);
  Eigen::Matrix2cd k0 = Eigen::Matrix2cd::Zero(), k1 = Eigen::Matrix2cd::Zero();
  k0(0, 0) = 1.0;
  k0(1, 1) = q;
  k1(0, 1) = std::sqrt(std::max(0.0, 1.0 - std::norm(q)));
  return {v * k0 * v.adjoint(), v * k1 * v.adjoint()};
}

/// Choi matrix sum_k |K_k>><<K_k| with |K>> = sum_i |i> (x) K|i>.
inline Eigen::Matrix4cd choi_from_kraus(const std::vector<Eigen::Matrix2cd>& ks) {
  Eigen::Matrix4cd c = Eigen::Matrix4cd::Zero();
  for (const auto& k : ks) {
    Eigen::Vector4cd v;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) v(2 * i + j) = k(j, i);
    c += v * v.adjoint();
  }
  return c;
}

/// Composite Simpson on n+1 equispaced samples; when n is odd the last three
/// intervals use the 3/8 rule.
inline double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size() - 1;
  if (n == 1) return 0.5 * h * (f[0] + f[1]);
  std::size_t m = n % 2 == 0 ? n : n - 3;
  double sum = 0.0;
  for (std::size_t i = 0; i + 2 <= m; i += 2) sum += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
  if (m != n) sum += 3.0 * h / 8.0 * (f[m] + 3.0 * f[m + 1] + 3.0 * f[m + 2] + f[m + 3]);
  return sum;
}

inline double simpson(const std::function<double(double)>& fn, double a, double b, std::size_t n) {
  std::vector<double> f(n + 1);
  const double h = (b - a) / static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) f[i] = fn(a + h * static_cast<double>(i));
  return simpson(f, h);
}

/// Brute-force max over an equispaced phi scan on [-pi, pi).
inline double scan_max(const std::function<double(double)>& fn, std::size_t samples) {
  double best = -INFINITY;
  for (std::size_t i = 0; i < samples; ++i)
    best = std::max(best, fn(-std::numbers::pi + 2.0 * std::numbers::pi * i / samples));
  return best;
}

/// Equispaced scan followed by golden-section refinement inside the
/// bracketing cells of the best sample.
inline double scan_max_refined(const std::function<double(double)>& fn, std::size_t samples) {
  const double h = 2.0 * std::numbers::pi / samples;
  double best = -INFINITY, best_x = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = -std::numbers::pi + h * i;
    if (const double v = fn(x); v > best) best = v, best_x = x;
  }
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = best_x - h, b = best_x + h;
  for (int it = 0; it < 80; ++it) {
    const double c = b - r * (b - a), d = a + r * (b - a);
    if (fn(c) > fn(d)) b = d; else a = c;
  }
  return std::max(best, fn(0.5 * (a + b)));
}

inline DensityMatrix random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double gg = u(rng);
  const double r = u(rng) * std::sqrt(gg * (1.0 - gg));
  return DensityMatrix::from_components(gg, std::polar(r, 2.0 * std::numbers::pi * u(rng)));
}

struct ParamSample {
  double omega_rabi, delta_drive, lambda, delta_spec;
};

/// lambda, Omega, |delta|, Delta drawn uniformly from [0, 10] (lambda floored
/// away from zero).
inline ParamSample random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 10.0), s(-10.0, 10.0);
  return {u(rng), u(rng), std::max(1e-3, u(rng)), s(rng)};
}

}  // namespace qsync::oracle
