#pragma once

#include <variant>
#include <vector>

#include "catsim/beam_noise.hpp"
#include "catsim/lindblad_oracle.hpp"
#include "catsim/ms_dynamics.hpp"
#include "catsim/quantum_core.hpp"

// Pulse sequences for the photon-echo interferometer: carrier rotations on
// the spin, bichromatic force pulses, Stark phase accumulation and its
// compensation pulse.

namespace catsim {

// A pi/2 carrier pulse takes 13 us on the apparatus; pulse durations are
// bookkeeping only (rotations are modeled as instantaneous).
inline constexpr double kPiHalfPulseTime = 13e-6;

struct CarrierRotation {
  double theta;     // rotation angle, rad, in [0, 2pi]
  double phase;     // azimuthal reference phase, rad
  double duration;  // s
};

// Force pulse; a concurrent Stark phase at stark_rate accumulates over the
// pulse without extending it.
struct MsForce {
  ForceParams force;
  double stark_rate = 0.0;  // rad/s of sigma_z phase during the pulse
};

struct StarkPhase {
  double rate;      // rad/s
  double duration;  // s
};

struct Wait {
  double duration;
};

using Pulse = std::variant<CarrierRotation, MsForce, StarkPhase, Wait>;

struct PulseSequence {
  std::vector<Pulse> pulses;

  double total_duration() const {
    double total = 0.0;
    for (const auto& p : pulses) {
      std::visit([&](const auto& pulse) { total += pulse_duration(pulse); },
                 p);
    }
    return total;
  }

 private:
  static double pulse_duration(const CarrierRotation& p) { return p.duration; }
  static double pulse_duration(const MsForce& p) { return p.force.tau; }
  static double pulse_duration(const StarkPhase& p) { return p.duration; }
  static double pulse_duration(const Wait& p) { return p.duration; }
};

// Carrier rotation on the spin, identity on motion. The convention is fixed
// so that theta = pi/2 at phase phi maps |up> to (|up> + e^{i phi}|down>)/sqrt2.
inline Eigen::Matrix2cd carrier_rotation_spin(double theta, double phi) {
  const Complex i(0.0, 1.0);
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  Eigen::Matrix2cd r;
  r << c, -std::exp(-i * phi) * s, std::exp(i * phi) * s, c;
  return r;
}

inline ComplexMatrix carrier_unitary(double theta, double phi,
                                     const FockSpace& space) {
  return kron(carrier_rotation_spin(theta, phi),
              ComplexMatrix::Identity(space.cutoff, space.cutoff));
}

// Accumulated sigma_z phase: exp(-i (theta/2) sigma_z) on the spin.
inline Eigen::Matrix2cd stark_spin(double theta) {
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Zero();
  u(0, 0) = std::exp(-i * (0.5 * theta));
  u(1, 1) = std::exp(i * (0.5 * theta));
  return u;
}

// Photon-echo interferometer: pi/2 - [force + concurrent Stark] - pi -
// [compensation] - pi/2, all carrier pulses at reference phase phi_o. The
// compensation pulse repeats the Stark phase in the second echo zone, where
// the preceding pi pulse inverts its effect; with it the net Stark phase at
// measurement is zero.
inline PulseSequence build_echo_sequence(double phi_o, const ForceParams& f,
                                         double stark_rate,
                                         bool include_compensation = true) {
  PulseSequence seq;
  seq.pulses.push_back(
      CarrierRotation{constants::kPi / 2.0, phi_o, kPiHalfPulseTime});
  seq.pulses.push_back(MsForce{f, stark_rate});
  seq.pulses.push_back(
      CarrierRotation{constants::kPi, phi_o, 2.0 * kPiHalfPulseTime});
  if (stark_rate != 0.0 && include_compensation) {
    seq.pulses.push_back(StarkPhase{stark_rate, f.tau});
  } else {
    seq.pulses.push_back(Wait{f.tau});
  }
  seq.pulses.push_back(
      CarrierRotation{constants::kPi / 2.0, phi_o, kPiHalfPulseTime});
  return seq;
}

enum class Engine { Closed, Oracle };

namespace detail {

struct SequenceRunner {
  FockSpace space;
  Engine engine;
  bool pure;
  ComplexVector psi;   // used when pure
  ComplexMatrix rho;   // used otherwise

  explicit SequenceRunner(const QuantumState& initial, Engine eng)
      : space(initial.fock_dim), engine(eng), pure(initial.pure_hint) {
    if (pure) {
      psi = pure_vector(initial);
    } else {
      rho = initial.rho;
    }
  }

  void apply_unitary(const ComplexMatrix& u) {
    if (pure) {
      psi = u * psi;
    } else {
      rho = u * rho * u.adjoint();
    }
  }

  void apply_spin(const Eigen::Matrix2cd& s) {
    apply_unitary(
        kron(s, ComplexMatrix::Identity(space.cutoff, space.cutoff)));
  }

  void apply_ms(const ForceParams& f) {
    if (engine == Engine::Closed) {
      apply_unitary(sd_displacement_unitary(f, f.tau, space));
    } else {
      IntegratorSpec spec = IntegratorSpec::for_force(f, 0.0);
      spec.cutoff = space.cutoff;
      if (pure) {
        psi = evolve_vector(psi, f, spec, 0.0, f.tau);
      } else {
        rho = evolve_density(rho, f, spec, 0.0, f.tau);
      }
    }
  }

  double pdown() const {
    if (pure) return psi.tail(space.cutoff).squaredNorm();
    double down = 0.0;
    for (int k = 0; k < space.cutoff; ++k) {
      down += rho(space.cutoff + k, space.cutoff + k).real();
    }
    return down;
  }
};

}  // namespace detail

// Execute a sequence and return the spin-down probability. The drift sample
// delta_phi shifts every carrier phase; the force's spin/motional phases pick
// it up through the beam-geometry mapping (spin phase for co-propagating,
// motional phase for counter-propagating).
inline double run_sequence(const QuantumState& initial,
                           const PulseSequence& seq, Engine engine,
                           double delta_phi, const BeamSetup& setup) {
  detail::SequenceRunner runner(initial, engine);
  const auto [phi_r, phi_b] = sideband_phases(setup, delta_phi);
  const auto [phi_s_shift, phi_m_shift] = ms_phases(phi_r, phi_b);
  for (const auto& pulse : seq.pulses) {
    if (const auto* c = std::get_if<CarrierRotation>(&pulse)) {
      runner.apply_spin(carrier_rotation_spin(c->theta, c->phase + delta_phi));
    } else if (const auto* m = std::get_if<MsForce>(&pulse)) {
      ForceParams f = m->force;
      f.phi_s += phi_s_shift;
      f.phi_m += phi_m_shift;
      runner.apply_ms(f);
      if (m->stark_rate != 0.0) {
        runner.apply_spin(stark_spin(m->stark_rate * f.tau));
      }
    } else if (const auto* s = std::get_if<StarkPhase>(&pulse)) {
      runner.apply_spin(stark_spin(s->rate * s->duration));
    }
    // Wait: identity
  }
  return runner.pdown();
}

}  // namespace catsim
