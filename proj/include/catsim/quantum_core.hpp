#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "catsim/constants.hpp"
#include "catsim/errors.hpp"

// Complex linear algebra on the spin (x) Fock Hilbert space of a single
// trapped ion: ladder operators, coherent displacements, thermal states,
// and fluorescence-style spin readout.
//
// Basis ordering is spin-major and fixed project-wide: index = s*N + n with
// s = 0 for |up>, s = 1 for |down>, and Fock level n in 0..N-1. Operators on
// the joint space are 2N x 2N; purely motional operators are N x N.

namespace catsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Truncated motional Hilbert space of dimension N >= 2.
struct FockSpace {
  int cutoff;

  explicit FockSpace(int n) : cutoff(n) {
    if (n < 2) {
      throw CutoffError("FockSpace cutoff must be >= 2, got " +
                        std::to_string(n));
    }
  }
  int joint_dim() const { return 2 * cutoff; }
};

// Density operator on the joint spin (x) Fock space.
struct QuantumState {
  ComplexMatrix rho;  // 2N x 2N, spin-major basis as documented above
  int fock_dim = 0;
  bool pure_hint = false;

  int joint_dim() const { return 2 * fock_dim; }
};

// Ion and trap constants. The ground-state size z0 = sqrt(hbar/2 m wz) is
// derived once at construction and cached.
struct TrapConfig {
  double mass_kg = constants::kCd111IonMassKg;
  double omega_z = constants::kDefaultAxialFreq;           // rad/s
  double omega_hf = constants::kHyperfineSplitting;        // rad/s, reference
  double nbar = constants::kSidebandCooledNbar;
  double ndot = constants::kMeasuredHeatingRate;           // quanta/s
  double z0 = 0.0;                                         // m, cached

  TrapConfig() { z0 = ground_state_size(); }
  TrapConfig(double mass, double wz, double n = 0.0, double nd = 0.0)
      : mass_kg(mass), omega_z(wz), nbar(n), ndot(nd) {
    if (omega_z <= 0.0) throw ConfigError("trap omega_z must be positive");
    if (nbar < 0.0 || ndot < 0.0) {
      throw ConfigError("trap nbar and heating rate must be nonnegative");
    }
    z0 = ground_state_size();
  }

  double ground_state_size() const {
    return std::sqrt(constants::kHBar / (2.0 * mass_kg * omega_z));
  }
};

// Kronecker product, row-major consistent with the spin-major ordering:
// kron(spin_op, motion_op) places the motion block inside each spin entry.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Lowering and raising operators on the truncated Fock space. The lowering
// operator has sqrt(n) on the (n-1, n) superdiagonal.
inline std::pair<ComplexMatrix, ComplexMatrix> ladder_operators(
    const FockSpace& space) {
  const int n = space.cutoff;
  ComplexMatrix lower = ComplexMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    lower(k - 1, k) = std::sqrt(static_cast<double>(k));
  }
  return {lower, lower.adjoint()};
}

// Default cutoff policy: sized so that truncation-induced trace loss stays
// below ~1e-8 for displacements up to |alpha|_max on a thermal background.
inline int default_fock_cutoff(double alpha_max, double nbar) {
  const double need = 8.0 * (alpha_max * alpha_max + 4.0 * nbar);
  return std::max(32, static_cast<int>(std::ceil(need)));
}

// Coherent displacement D(alpha) = exp(alpha a^dag - alpha* a), built by
// eigendecomposition of the Hermitian generator i(alpha a^dag - alpha* a);
// the result is exactly unitary at any cutoff.
inline ComplexMatrix displacement_operator(Complex alpha,
                                           const FockSpace& space) {
  const double a2 = std::norm(alpha);
  if (a2 > space.cutoff / 4.0) {
    throw CutoffError("displacement |alpha|^2 = " + std::to_string(a2) +
                      " exceeds N/4 with N = " + std::to_string(space.cutoff));
  }
  auto [lower, raise] = ladder_operators(space);
  const Complex i(0.0, 1.0);
  ComplexMatrix gen = i * (alpha * raise - std::conj(alpha) * lower);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gen);
  ComplexVector phase(space.cutoff);
  for (int k = 0; k < space.cutoff; ++k) {
    phase(k) = std::exp(-i * es.eigenvalues()(k));
  }
  return es.eigenvectors() * phase.asDiagonal() *
         es.eigenvectors().adjoint();
}

// Motional thermal state with mean occupation nbar, as an N x N density
// matrix: p_n proportional to nbar^n/(nbar+1)^(n+1), renormalized after
// truncation. Fails if the truncated tail mass reaches tail_tol.
inline ComplexMatrix thermal_state(double nbar, const FockSpace& space,
                                   double tail_tol = 1e-4) {
  if (nbar < 0.0) throw ConfigError("thermal nbar must be nonnegative");
  const int n = space.cutoff;
  ComplexMatrix rho = ComplexMatrix::Zero(n, n);
  if (nbar == 0.0) {
    rho(0, 0) = 1.0;
    return rho;
  }
  const double ratio = nbar / (nbar + 1.0);
  // tail mass of the geometric distribution beyond the cutoff
  const double tail = std::pow(ratio, n);
  if (tail >= tail_tol) {
    throw CutoffError("thermal tail mass " + std::to_string(tail) +
                      " at N = " + std::to_string(n) + " exceeds tolerance " +
                      std::to_string(tail_tol));
  }
  double norm = 0.0;
  double w = 1.0 / (nbar + 1.0);
  for (int k = 0; k < n; ++k) {
    rho(k, k) = w;
    norm += w;
    w *= ratio;
  }
  rho /= norm;
  return rho;
}

// Joint state |spinor> x motional density matrix (spinor gets normalized).
inline QuantumState compose_state(const Eigen::Vector2cd& spinor,
                                  const ComplexMatrix& motional,
                                  bool pure_hint = false) {
  Eigen::Vector2cd s = spinor.normalized();
  ComplexMatrix spin_rho = s * s.adjoint();
  QuantumState state;
  state.fock_dim = static_cast<int>(motional.rows());
  state.rho = kron(spin_rho, motional);
  state.pure_hint = pure_hint;
  return state;
}

// Spin populations (P_up, P_down) by partial trace over motion.
inline std::pair<double, double> spin_populations(const QuantumState& state) {
  const int n = state.fock_dim;
  double up = 0.0, down = 0.0;
  for (int k = 0; k < n; ++k) {
    up += state.rho(k, k).real();
    down += state.rho(n + k, n + k).real();
  }
  return {up, down};
}

// Mean motional occupation <n> (partial trace over spin).
inline double mean_phonon_number(const QuantumState& state) {
  const int n = state.fock_dim;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    acc += k * (state.rho(k, k).real() + state.rho(n + k, n + k).real());
  }
  return acc;
}

// Check the density-matrix invariants. The positivity check costs an
// eigendecomposition, so it is opt-in.
inline void validate_state(const QuantumState& state,
                           bool check_positivity = false) {
  const ComplexMatrix& rho = state.rho;
  if (rho.rows() != rho.cols() || rho.rows() != 2 * state.fock_dim) {
    throw NumericsError("state dimension mismatch");
  }
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12) {
    throw NumericsError("state not Hermitian: max deviation " +
                        std::to_string(herm));
  }
  const double tr = rho.trace().real();
  const double deficit = std::abs(tr - 1.0);
  if (deficit > 1e-4) {
    throw CutoffError("trace deficit " + std::to_string(deficit) +
                      " signals Fock truncation failure");
  }
  if (deficit > 1e-9) {
    throw NumericsError("state trace " + std::to_string(tr) +
                        " outside tolerance");
  }
  if (check_positivity) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho);
    if (es.eigenvalues().minCoeff() < -1e-10) {
      throw NumericsError("state has negative eigenvalue " +
                          std::to_string(es.eigenvalues().minCoeff()));
    }
  }
}

}  // namespace catsim
