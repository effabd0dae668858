#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "catsim/ms_dynamics.hpp"
#include "catsim/quantum_core.hpp"

// Brute-force reference engine: fixed-step RK4 integration of the
// interaction-frame dynamics, as a Schrodinger equation for pure states and
// as a Lindblad master equation with the symmetric heating pair
// sqrt(ndot) a, sqrt(ndot) a^dag for density matrices.

namespace catsim {

struct IntegratorSpec {
  double dt;        // step size, s
  int cutoff;       // Fock dimension N
  double ndot = 0;  // heating rate, quanta/s

  // Largest admissible step for the given force.
  static double max_step(const ForceParams& f) {
    double period = constants::kTwoPi / f.omega_sb;
    if (f.delta != 0.0) {
      period = std::min(period, constants::kTwoPi / std::abs(f.delta));
    }
    return period / 200.0;
  }

  // Default spec: cutoff from the trajectory extent and thermal background,
  // step a factor 2 finer than the admissibility bound.
  static IntegratorSpec for_force(const ForceParams& f, double nbar,
                                  double ndot = 0.0, double step_divisor = 400.0) {
    IntegratorSpec spec;
    spec.cutoff = default_fock_cutoff(max_alpha_abs(f, f.tau), nbar);
    double period = constants::kTwoPi / f.omega_sb;
    if (f.delta != 0.0) {
      period = std::min(period, constants::kTwoPi / std::abs(f.delta));
    }
    spec.dt = period / step_divisor;
    spec.ndot = ndot;
    return spec;
  }

  void validate(const ForceParams& f) const {
    if (ndot < 0.0) throw ConfigError("integrator ndot must be nonnegative");
    if (cutoff < 2) throw CutoffError("integrator cutoff must be >= 2");
    if (dt <= 0.0 || dt > max_step(f) * (1.0 + 1e-12)) {
      throw NumericsError("integrator step exceeds min(2pi/delta, 2pi/omega)/200");
    }
  }
};

// Interaction-frame Hamiltonian at time t, in units of hbar (rad/s):
// H(t) = -(omega_sb/2) sigma_phi (a e^{i delta t + i phi_m} + h.c.).
inline ComplexMatrix hamiltonian_at(const ForceParams& f, double t,
                                    const FockSpace& space) {
  const Complex i(0.0, 1.0);
  auto [lower, raise] = ladder_operators(space);
  const Complex phase = std::exp(i * (f.delta * t + f.phi_m));
  ComplexMatrix quad = lower * phase + raise * std::conj(phase);
  Eigen::Matrix2cd sigma_phi;
  sigma_phi << 0.0, std::exp(-i * f.phi_s), std::exp(i * f.phi_s), 0.0;
  return -0.5 * f.omega_sb * kron(sigma_phi, quad);
}

namespace detail {

// The structured right-hand sides below apply the ladder operators as row and
// column shifts instead of dense products; they mirror the truncated matrices
// from ladder_operators() exactly so that the trace is conserved. A unit test
// checks them against the dense construction.

// out = -i [H(t), rho] + ndot (D[a] + D[a^dag]) rho with the block structure
// H = sigma_phi (x) (c a + conj(c) a^dag), c = -(omega/2) e^{i(delta t+phi_m)}.
inline void lindblad_rhs(const ForceParams& f, double ndot, double t, int n,
                         const ComplexMatrix& rho, ComplexMatrix& out) {
  const Complex i(0.0, 1.0);
  const Complex c = -0.5 * f.omega_sb * std::exp(i * (f.delta * t + f.phi_m));
  const Complex cb = std::conj(c);
  const Complex ep = std::exp(i * f.phi_s), em = std::conj(ep);
  out.setZero();

  // -i H rho:
  // out.topRows(n)    += -i em (c a + cb a^dag) rho.bottomRows(n)
  // out.bottomRows(n) += -i ep (c a + cb a^dag) rho.topRows(n)
  for (int k = 0; k < n - 1; ++k) {
    const double s = std::sqrt(static_cast<double>(k + 1));
    out.row(k) += (-i * em * c) * s * rho.row(n + k + 1);
    out.row(n + k) += (-i * ep * c) * s * rho.row(k + 1);
  }
  for (int k = 1; k < n; ++k) {
    const double s = std::sqrt(static_cast<double>(k));
    out.row(k) += (-i * em * cb) * s * rho.row(n + k - 1);
    out.row(n + k) += (-i * ep * cb) * s * rho.row(k - 1);
  }
  // +i rho H: left cols <- +i ep (rho_right m), right cols <- +i em (rho_left m)
  for (int k = 1; k < n; ++k) {
    const double s = std::sqrt(static_cast<double>(k));
    out.col(k) += (i * ep * c) * s * rho.col(n + k - 1);
    out.col(n + k) += (i * em * c) * s * rho.col(k - 1);
  }
  for (int k = 0; k < n - 1; ++k) {
    const double s = std::sqrt(static_cast<double>(k + 1));
    out.col(k) += (i * ep * cb) * s * rho.col(n + k + 1);
    out.col(n + k) += (i * em * cb) * s * rho.col(k + 1);
  }

  if (ndot > 0.0) {
    Eigen::VectorXd w(n - 1);  // sqrt(1)..sqrt(n-1)
    for (int k = 0; k < n - 1; ++k) w(k) = std::sqrt(static_cast<double>(k + 1));
    // a rho a^dag and a^dag rho a, blockwise on both spin sectors
    for (int sr = 0; sr < 2; ++sr) {
      for (int sc = 0; sc < 2; ++sc) {
        const int r0 = sr * n, c0 = sc * n;
        out.block(r0, c0, n - 1, n - 1) +=
            ndot * (w.asDiagonal() * rho.block(r0 + 1, c0 + 1, n - 1, n - 1) *
                    w.asDiagonal());
        out.block(r0 + 1, c0 + 1, n - 1, n - 1) +=
            ndot * (w.asDiagonal() * rho.block(r0, c0, n - 1, n - 1) *
                    w.asDiagonal());
      }
    }
    // -(ndot/2) { a^dag a + a a^dag , rho }; the truncated a a^dag diagonal
    // is n+1 for n < N-1 and 0 at the cutoff edge.
    Eigen::VectorXd d(2 * n);
    for (int p = 0; p < 2 * n; ++p) {
      const int np = p % n;
      d(p) = np + (np < n - 1 ? np + 1.0 : 0.0);
    }
    out -= (0.5 * ndot) * (d.asDiagonal() * rho + rho * d.asDiagonal());
  }
}

// out = -i H(t) psi for a state vector.
inline void schrodinger_rhs(const ForceParams& f, double t, int n,
                            const ComplexVector& psi, ComplexVector& out) {
  const Complex i(0.0, 1.0);
  const Complex c = -0.5 * f.omega_sb * std::exp(i * (f.delta * t + f.phi_m));
  const Complex cb = std::conj(c);
  const Complex ep = std::exp(i * f.phi_s), em = std::conj(ep);
  out.setZero();
  for (int k = 0; k < n - 1; ++k) {
    const double s = std::sqrt(static_cast<double>(k + 1));
    out(k) += (-i * em * c) * s * psi(n + k + 1);
    out(n + k) += (-i * ep * c) * s * psi(k + 1);
  }
  for (int k = 1; k < n; ++k) {
    const double s = std::sqrt(static_cast<double>(k));
    out(k) += (-i * em * cb) * s * psi(n + k - 1);
    out(n + k) += (-i * ep * cb) * s * psi(k - 1);
  }
}

}  // namespace detail

// Integrate a pure state vector from t0 over duration with fixed-step RK4.
inline ComplexVector evolve_vector(const ComplexVector& psi0,
                                   const ForceParams& f,
                                   const IntegratorSpec& spec, double t0,
                                   double duration) {
  const int n = spec.cutoff;
  const int steps = std::max(1, static_cast<int>(std::ceil(duration / spec.dt)));
  const double h = duration / steps;
  ComplexVector psi = psi0, k1(2 * n), k2(2 * n), k3(2 * n), k4(2 * n),
                tmp(2 * n);
  for (int s = 0; s < steps; ++s) {
    const double t = t0 + s * h;
    detail::schrodinger_rhs(f, t, n, psi, k1);
    tmp = psi + (0.5 * h) * k1;
    detail::schrodinger_rhs(f, t + 0.5 * h, n, tmp, k2);
    tmp = psi + (0.5 * h) * k2;
    detail::schrodinger_rhs(f, t + 0.5 * h, n, tmp, k3);
    tmp = psi + h * k3;
    detail::schrodinger_rhs(f, t + h, n, tmp, k4);
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const double drift = std::abs(psi.squaredNorm() - 1.0);
  if (drift > 1e-5) {
    throw NumericsError("state norm drift " + std::to_string(drift) +
                        "; reduce the integrator step");
  }
  return psi;
}

// Integrate a density matrix from t0 over duration.
inline ComplexMatrix evolve_density(const ComplexMatrix& rho0,
                                    const ForceParams& f,
                                    const IntegratorSpec& spec, double t0,
                                    double duration) {
  const int n = spec.cutoff;
  const int dim = 2 * n;
  const int steps = std::max(1, static_cast<int>(std::ceil(duration / spec.dt)));
  const double h = duration / steps;
  ComplexMatrix rho = rho0, k1(dim, dim), k2(dim, dim), k3(dim, dim),
                k4(dim, dim), tmp(dim, dim);
  for (int s = 0; s < steps; ++s) {
    const double t = t0 + s * h;
    detail::lindblad_rhs(f, spec.ndot, t, n, rho, k1);
    tmp = rho + (0.5 * h) * k1;
    detail::lindblad_rhs(f, spec.ndot, t + 0.5 * h, n, tmp, k2);
    tmp = rho + (0.5 * h) * k2;
    detail::lindblad_rhs(f, spec.ndot, t + 0.5 * h, n, tmp, k3);
    tmp = rho + h * k3;
    detail::lindblad_rhs(f, spec.ndot, t + h, n, tmp, k4);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const double drift = std::abs(rho.trace().real() - 1.0);
  if (drift > 1e-5) {
    throw NumericsError("trace drift " + std::to_string(drift) +
                        "; reduce the integrator step");
  }
  return rho;
}

// Extract the state vector from a density matrix flagged pure.
inline ComplexVector pure_vector(const QuantumState& state) {
  Eigen::Index jmax = 0;
  state.rho.diagonal().real().maxCoeff(&jmax);
  const double pj = state.rho(jmax, jmax).real();
  if (pj <= 0.0) throw NumericsError("cannot extract vector from zero state");
  return state.rho.col(jmax) / std::sqrt(pj);
}

// Evolve a state under the force for duration f.tau. With ndot = 0 and a
// pure input the integration runs on the state vector and the density matrix
// is reassembled from the outer product.
inline QuantumState evolve(const QuantumState& rho0, const ForceParams& f,
                           const IntegratorSpec& spec) {
  spec.validate(f);
  if (rho0.joint_dim() != 2 * spec.cutoff) {
    throw CutoffError("state dimension does not match integrator cutoff");
  }
  const double amax = max_alpha_abs(f, f.tau);
  if (amax * amax > spec.cutoff / 4.0) {
    throw CutoffError("trajectory exceeds cutoff margin |alpha|^2 <= N/4");
  }
  QuantumState out;
  out.fock_dim = spec.cutoff;
  if (spec.ndot == 0.0 && rho0.pure_hint) {
    ComplexVector psi = evolve_vector(pure_vector(rho0), f, spec, 0.0, f.tau);
    out.rho = psi * psi.adjoint();
    out.pure_hint = true;
  } else {
    out.rho = evolve_density(rho0.rho, f, spec, 0.0, f.tau);
    out.pure_hint = false;
  }
  return out;
}

// Spin-down probability sampled on an ascending time grid from one
// continuous integration.
inline std::vector<double> pdown_vs_time(const QuantumState& rho0,
                                         const ForceParams& f,
                                         const IntegratorSpec& spec,
                                         const std::vector<double>& t_grid) {
  spec.validate(f);
  for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
    if (t_grid[k + 1] <= t_grid[k]) {
      throw ConfigError("time grid must be strictly ascending");
    }
  }
  if (!t_grid.empty() && t_grid.front() < 0.0) {
    throw ConfigError("time grid must be nonnegative");
  }
  std::vector<double> pdown;
  pdown.reserve(t_grid.size());
  QuantumState state = rho0;
  const bool pure_path = (spec.ndot == 0.0 && rho0.pure_hint);
  ComplexVector psi;
  if (pure_path) psi = pure_vector(rho0);
  double t = 0.0;
  for (double tg : t_grid) {
    const double seg = tg - t;
    if (seg > 0.0) {
      if (pure_path) {
        psi = evolve_vector(psi, f, spec, t, seg);
      } else {
        state.rho = evolve_density(state.rho, f, spec, t, seg);
      }
      t = tg;
    }
    if (pure_path) {
      double down = psi.tail(spec.cutoff).squaredNorm();
      pdown.push_back(down);
    } else {
      pdown.push_back(spin_populations(state).second);
    }
  }
  return pdown;
}

}  // namespace catsim
