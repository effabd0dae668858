#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "catsim/quantum_core.hpp"

// Closed-form model of the bichromatic spin-dependent force: the phase-space
// trajectory alpha(t), the spin-dependent displacement unitary, the cat-state
// return probability, the Ramsey fringe signal, and derived observables.

namespace catsim {

// Parameters of the bichromatic (Molmer-Sorensen) force. Assumes balanced
// sideband Rabi frequencies and detunings; the single detuning delta is
// signed, with delta = 0 treated as the resonant limit where a formula
// admits one.
struct ForceParams {
  double omega_sb;   // sideband Rabi frequency, rad/s
  double delta;      // force detuning, rad/s (signed)
  double phi_s = 0;  // spin phase, rad
  double phi_m = 0;  // motional phase, rad
  double tau = 0;    // pulse duration, s

  ForceParams(double omega, double det, double ps = 0.0, double pm = 0.0,
              double duration = 0.0)
      : omega_sb(omega), delta(det), phi_s(ps), phi_m(pm), tau(duration) {
    if (omega_sb <= 0.0) throw ConfigError("omega_sb must be positive");
    if (tau < 0.0) throw ConfigError("force duration must be nonnegative");
  }

  // Circle radius of the displacement trajectory, defined for delta != 0.
  double alpha0() const {
    if (delta == 0.0) throw NumericsError("alpha0 undefined at delta = 0");
    return omega_sb / (2.0 * delta);
  }
};

// Displacement trajectory alpha(t) = alpha0 e^{-i phi_m} (1 - e^{-i delta t});
// at delta = 0 the analytic limit (i/2) omega_sb t e^{-i phi_m}.
inline Complex alpha_trajectory(const ForceParams& f, double t) {
  if (t < 0.0) throw ConfigError("trajectory time must be nonnegative");
  const Complex i(0.0, 1.0);
  const Complex dir = std::exp(-i * f.phi_m);
  if (f.delta == 0.0) {
    return i * 0.5 * f.omega_sb * t * dir;
  }
  return f.alpha0() * dir * (1.0 - std::exp(-i * (f.delta * t)));
}

// Maximum |alpha| reached anywhere on the trajectory up to time t.
inline double max_alpha_abs(const ForceParams& f, double t) {
  if (f.delta == 0.0) return 0.5 * f.omega_sb * t;
  const double a0 = std::abs(f.alpha0());
  // |alpha| = 2|alpha0| |sin(delta t/2)|: monotone up to the first half turn
  if (std::abs(f.delta) * t >= constants::kPi) return 2.0 * a0;
  return std::abs(alpha_trajectory(f, t));
}

// Real-space displacements for a phase-space point alpha:
// z = 2 z0 Re(alpha), p = 2 m wz z0 Im(alpha).
inline std::pair<double, double> position_momentum(Complex alpha,
                                                   const TrapConfig& trap) {
  const double z = 2.0 * trap.z0 * alpha.real();
  const double p = 2.0 * trap.mass_kg * trap.omega_z * trap.z0 * alpha.imag();
  return {z, p};
}

// Eigenstates |up_phi>, |down_phi> of sigma_phi = e^{-i phi_s} sigma_+ +
// e^{i phi_s} sigma_-, as columns of a 2x2 matrix.
inline Eigen::Matrix2cd sigma_phi_eigenbasis(double phi_s) {
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd basis;
  const double inv = 1.0 / std::sqrt(2.0);
  basis(0, 0) = inv;
  basis(1, 0) = inv * std::exp(i * phi_s);   // |up_phi>
  basis(0, 1) = inv;
  basis(1, 1) = -inv * std::exp(i * phi_s);  // |down_phi>
  return basis;
}

// Spin-dependent displacement generated by the force up to time t:
// U = D(alpha) |up_phi><up_phi| + D(-alpha) |down_phi><down_phi|.
inline ComplexMatrix sd_displacement_unitary(const ForceParams& f, double t,
                                             const FockSpace& space) {
  const Complex alpha = alpha_trajectory(f, t);
  if (std::norm(alpha) > space.cutoff / 4.0) {
    throw CutoffError("spin-dependent displacement exceeds cutoff margin");
  }
  const Eigen::Matrix2cd basis = sigma_phi_eigenbasis(f.phi_s);
  const Eigen::Vector2cd up = basis.col(0), down = basis.col(1);
  const ComplexMatrix d_plus = displacement_operator(alpha, space);
  const ComplexMatrix d_minus = displacement_operator(-alpha, space);
  return kron(up * up.adjoint(), d_plus) + kron(down * down.adjoint(), d_minus);
}

// Probability of measuring |down> after applying the force for time tau to
// an ion prepared in |up> with thermal occupation nbar and heating rate ndot:
// 1/2 [1 - exp(-(1/2) ndot tau |4 alpha0|^2 - (nbar + 1/2) |2 alpha(tau)|^2)].
inline double cat_probability(const ForceParams& f, double nbar, double ndot,
                              double tau) {
  if (f.delta == 0.0) {
    throw NumericsError("cat probability requires delta != 0");
  }
  if (nbar < 0.0 || ndot < 0.0) {
    throw ConfigError("nbar and ndot must be nonnegative");
  }
  const double a0 = f.alpha0();
  const double alpha_abs2 = std::norm(alpha_trajectory(f, tau));
  const double exponent =
      -0.5 * ndot * tau * 16.0 * a0 * a0 - (nbar + 0.5) * 4.0 * alpha_abs2;
  const double p = 0.5 * (1.0 - std::exp(exponent));
  return std::clamp(p, 0.0, 0.5);
}

// Ramsey fringe signal P_down = pcat sin^2(phi_o - phi_s).
inline double ramsey_signal(double phi_o, double phi_s, double pcat) {
  if (pcat < 0.0 || pcat > 0.5) {
    throw ConfigError("pcat must lie in [0, 1/2]");
  }
  const double s = std::sin(phi_o - phi_s);
  return pcat * s * s;
}

// Separation of the two cat components in units of z0: 4 |alpha(t)|.
inline double cat_separation(const ForceParams& f, double t) {
  return 4.0 * std::abs(alpha_trajectory(f, t));
}

// Trajectory-closure times {2 pi m / |delta|, m = 1..m_max}.
inline std::vector<double> revival_times(double delta, int m_max) {
  if (delta == 0.0) throw NumericsError("revival times require delta != 0");
  std::vector<double> times;
  times.reserve(std::max(m_max, 0));
  for (int m = 1; m <= m_max; ++m) {
    times.push_back(constants::kTwoPi * m / std::abs(delta));
  }
  return times;
}

}  // namespace catsim
