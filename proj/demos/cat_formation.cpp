// Periodic entanglement and disentanglement of spin and motion under the
// bichromatic force: prints the fringe along one trajectory circle and the
// phase-space size of the cat at the half-way point.

#include <cstdio>

#include "catsim/lindblad_oracle.hpp"
#include "catsim/ms_dynamics.hpp"

int main() {
  using namespace catsim;
  const double two_pi = constants::kTwoPi;

  ForceParams force(two_pi * 2.2e3, two_pi * 5.46e3);
  TrapConfig trap;
  const double period = two_pi / force.delta;

  std::printf("force: omega_sb/2pi = %.2f kHz, delta/2pi = %.2f kHz\n",
              force.omega_sb / two_pi / 1e3, force.delta / two_pi / 1e3);
  std::printf("trajectory period %.1f us, circle radius |alpha0| = %.3f\n\n",
              period * 1e6, std::abs(force.alpha0()));

  std::printf("  tau/us   |alpha|    dz/z0    P_down(cold)  P_down(hot n=8.1)\n");
  for (int k = 0; k <= 8; ++k) {
    const double tau = k * period / 8.0;
    const Complex alpha = alpha_trajectory(force, tau);
    const double cold =
        tau > 0 ? cat_probability(force, 0.0, 0.0, tau) : 0.0;
    const double hot =
        tau > 0 ? cat_probability(force, 8.1, 0.0, tau) : 0.0;
    std::printf("  %6.1f   %.4f    %.4f      %.4f        %.4f\n", tau * 1e6,
                std::abs(alpha), cat_separation(force, tau), cold, hot);
  }

  // cross-check the half-circle point against the integrated dynamics
  ForceParams half = force;
  half.tau = period / 2.0;
  const int cutoff = default_fock_cutoff(max_alpha_abs(half, half.tau), 0.0);
  FockSpace space(cutoff);
  QuantumState rho0 = compose_state(Eigen::Vector2cd(1.0, 0.0),
                                    thermal_state(0.0, space), true);
  IntegratorSpec spec = IntegratorSpec::for_force(half, 0.0);
  const double oracle = spin_populations(evolve(rho0, half, spec)).second;
  std::printf("\nhalf-circle check: closed form %.6f, integrated %.6f\n",
              cat_probability(half, 0.0, 0.0, half.tau), oracle);
  return 0;
}
