#pragma once

// Exact reduced dynamics of the driven TLS. In the dressed basis the bath
// acts as amplitude damping of |E> toward |G> with survival amplitude q(t);
// written out in the lab {|g>, |e>} basis this gives the coefficients below.

#include <array>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qsync/amplitude.hpp"
#include "qsync/density_matrix.hpp"
#include "qsync/model_params.hpp"

namespace qsync {

/// Arbitrary (not necessarily Hermitian) 2x2 operator, index 0 = |g>.
using Matrix2c = std::array<std::array<complex, 2>, 2>;

/// The channel at a single instant, fixed by the mixing angle and q(t).
///
/// rho_gg(t) = a_gg rho_gg + a_ge rho_ge + a_ee rho_ee + a_eg rho_eg
/// rho_ge(t) = b_gg rho_gg + b_ge rho_ge + b_ee rho_ee + b_eg rho_eg
///
/// with rho_ee(t) = 1 - rho_gg(t) and rho_eg(t) = conj(rho_ge(t)).
class ChannelAt {
 public:
  ChannelAt(const DressedAngles& angles, complex q, double time = 0.0)
      : time_(time), q_(q) {
    const double eta = angles.eta;
    const double c = angles.cos_half(), s = angles.sin_half();
    const double c2 = c * c, s2 = s * s;
    const double sin_eta = std::sin(eta), cos_eta = std::cos(eta);
    const double q2 = std::norm(q);
    const complex qc = std::conj(q);

    aux_a_ = 0.25 * sin_eta * sin_eta * 2.0 * q.real();
    aux_b_ = 0.5 * sin_eta * (c2 * qc - s2 * q);

    a_gg_ = c2 - cos_eta * s2 * q2 + aux_a_;
    a_ge_ = -0.25 * std::sin(2.0 * eta) * q2 + aux_b_;
    a_ee_ = c2 - cos_eta * c2 * q2 - aux_a_;
    a_eg_ = -0.25 * std::sin(2.0 * eta) * q2 + std::conj(aux_b_);

    b_gg_ = -0.5 * sin_eta + sin_eta * s2 * q2 + aux_b_;
    b_ge_ = 0.5 * sin_eta * sin_eta * q2 + c2 * c2 * qc + s2 * s2 * q;
    b_ee_ = -0.5 * sin_eta + sin_eta * c2 * q2 - aux_b_;
    b_eg_ = 0.5 * sin_eta * sin_eta * q2 - aux_a_;
  }

  double time() const { return time_; }
  complex q() const { return q_; }
  /// sin^2(eta)/4 * (q + q*)
  double aux_a() const { return aux_a_; }
  /// sin(eta)/2 * [cos^2(eta/2) q* - sin^2(eta/2) q]
  complex aux_b() const { return aux_b_; }

  DensityMatrix apply(const DensityMatrix& rho) const {
    const double gg = rho.rho_gg(), ee = rho.rho_ee();
    const complex ge = rho.rho_ge(), eg = rho.rho_eg();
    const complex out_gg = a_gg_ * gg + a_ge_ * ge + a_ee_ * ee + a_eg_ * eg;
    const complex out_ge = b_gg_ * gg + b_ge_ * ge + b_ee_ * ee + b_eg_ * eg;
    return DensityMatrix::unchecked(out_gg.real(), out_ge);
  }

  /// Complex-linear extension to any 2x2 operator.
  Matrix2c apply(const Matrix2c& x) const {
    const complex gg = x[0][0], ge = x[0][1], eg = x[1][0], ee = x[1][1];
    Matrix2c y{};
    y[0][0] = a_gg_ * gg + a_ge_ * ge + a_ee_ * ee + a_eg_ * eg;
    y[0][1] = b_gg_ * gg + b_ge_ * ge + b_ee_ * ee + b_eg_ * eg;
    y[1][1] = gg + ee - y[0][0];
    // Hermiticity preservation: Phi(X)_eg = conj(Phi(X^dagger)_ge)
    y[1][0] = std::conj(b_gg_) * gg + std::conj(b_ge_) * eg + std::conj(b_ee_) * ee +
              std::conj(b_eg_) * ge;
    return y;
  }

  /// Real 4x4 action on (rho_gg, Re rho_ge, Im rho_ge, rho_ee).
  Eigen::Matrix4d real_action() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    // rho_ge = x + iy, rho_eg = x - iy
    const complex a_x = a_ge_ + a_eg_, a_y = complex(0, 1) * (a_ge_ - a_eg_);
    const complex b_x = b_ge_ + b_eg_, b_y = complex(0, 1) * (b_ge_ - b_eg_);
    m.row(0) << a_gg_.real(), a_x.real(), a_y.real(), a_ee_.real();
    m.row(1) << b_gg_.real(), b_x.real(), b_y.real(), b_ee_.real();
    m.row(2) << b_gg_.imag(), b_x.imag(), b_y.imag(), b_ee_.imag();
    m.row(3) << 1.0 - a_gg_.real(), -a_x.real(), -a_y.real(), 1.0 - a_ee_.real();
    return m;
  }

  /// Choi matrix sum_ij |i><j| (x) Phi(|i><j|).
  Eigen::Matrix4cd choi() const {
    Eigen::Matrix4cd m;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        Matrix2c e{};
        e[i][j] = 1.0;
        const Matrix2c img = apply(e);
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) m(2 * i + k, 2 * j + l) = img[k][l];
      }
    return m;
  }

 private:
  double time_;
  complex q_;
  double aux_a_;
  complex aux_b_;
  complex a_gg_, a_ge_, a_ee_, a_eg_;
  complex b_gg_, b_ge_, b_ee_, b_eg_;
};

inline ChannelAt channel_at(const DriveParams& drive, const SpectrumParams& spectrum, double t) {
  return ChannelAt(derive_dressed(drive), q_closed_form(drive, spectrum, t), t);
}

namespace detail {

inline void require_physical(const DensityMatrix& rho) {
  if (const double v = rho.positivity_violation(); v > kPositivityTolerance)
    throw std::invalid_argument("initial state is not a valid density matrix (violation " +
                                std::to_string(v) + ")");
}

}  // namespace detail

/// rho(t) for a given survival amplitude.
inline DensityMatrix evolve_with_q(const DensityMatrix& rho0, const DressedAngles& angles,
                                   complex q) {
  detail::require_physical(rho0);
  return ChannelAt(angles, q).apply(rho0);
}

inline DensityMatrix evolve(const DensityMatrix& rho0, const DriveParams& drive,
                            const SpectrumParams& spectrum, double t) {
  drive.validate();
  spectrum.validate();
  return evolve_with_q(rho0, derive_dressed(drive), q_closed_form(drive, spectrum, t));
}

struct ChoiReport {
  double min_eigenvalue = 0.0;
  bool is_cp = true;
};

inline constexpr double kChoiTolerance = 1e-9;

inline ChoiReport choi_check(const ChannelAt& channel) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(channel.choi(),
                                                               Eigen::EigenvaluesOnly);
  const double min_ev = solver.eigenvalues().minCoeff();
  return {min_ev, min_ev >= -kChoiTolerance};
}

inline ChoiReport choi_check(const DriveParams& drive, const SpectrumParams& spectrum, double t) {
  return choi_check(channel_at(drive, spectrum, t));
}

/// evolve() over a time grid, with q from the closed form.
inline std::vector<DensityMatrix> trajectory(const DensityMatrix& rho0, const DriveParams& drive,
                                             const SpectrumParams& spectrum,
                                             std::span<const double> grid) {
  drive.validate();
  spectrum.validate();
  detail::require_physical(rho0);
  validate_time_grid(grid);
  const DressedAngles angles = derive_dressed(drive);
  std::vector<DensityMatrix> out;
  out.reserve(grid.size());
  for (double t : grid)
    out.push_back(ChannelAt(angles, q_closed_form(drive, spectrum, t)).apply(rho0));
  return out;
}

/// Trajectory driven by a precomputed amplitude series from any solver.
inline std::vector<DensityMatrix> trajectory(const DensityMatrix& rho0, const DriveParams& drive,
                                             const AmplitudeSeries& series) {
  detail::require_physical(rho0);
  const DressedAngles angles = derive_dressed(drive);
  std::vector<DensityMatrix> out;
  out.reserve(series.size());
  for (const complex& q : series.values) out.push_back(ChannelAt(angles, q).apply(rho0));
  return out;
}

}  // namespace qsync
