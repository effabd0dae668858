#include <catch2/catch_amalgamated.hpp>

#include "catsim/pulse_engine.hpp"

using namespace catsim;
using Catch::Matchers::WithinAbs;

namespace {
constexpr double kTwoPi = constants::kTwoPi;
constexpr double kPi = constants::kPi;

QuantumState up_ground(int cutoff) {
  FockSpace space(cutoff);
  return compose_state(Eigen::Vector2cd(1.0, 0.0), thermal_state(0.0, space),
                       true);
}
}  // namespace

TEST_CASE("carrier pulse conventions") {
  FockSpace space(4);
  SECTION("pi/2 at phase 0 makes the equal superposition") {
    ComplexMatrix u = carrier_unitary(kPi / 2.0, 0.0, space);
    ComplexVector psi0 = ComplexVector::Zero(8);
    psi0(0) = 1.0;
    ComplexVector psi = u * psi0;
    REQUIRE_THAT(std::abs(psi(0) - 1.0 / std::sqrt(2.0)), WithinAbs(0, 1e-12));
    REQUIRE_THAT(std::abs(psi(4) - 1.0 / std::sqrt(2.0)), WithinAbs(0, 1e-12));
  }
  SECTION("pi/2 at phase phi_o imprints e^{i phi_o} on |down>") {
    const double phi_o = 1.234;
    Eigen::Matrix2cd r = carrier_rotation_spin(kPi / 2.0, phi_o);
    Eigen::Vector2cd psi = r * Eigen::Vector2cd(1.0, 0.0);
    const Complex expected =
        std::exp(Complex(0, 1) * phi_o) / std::sqrt(2.0);
    REQUIRE_THAT(std::abs(psi(1) - expected), WithinAbs(0.0, 1e-12));
  }
  SECTION("2 pi rotation is minus the identity") {
    Eigen::Matrix2cd r = carrier_rotation_spin(kTwoPi, 0.7);
    REQUIRE((r + Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("two pi pulses restore populations") {
    Eigen::Matrix2cd r = carrier_rotation_spin(kPi, 0.3);
    Eigen::Vector2cd psi0(0.6, std::sqrt(1 - 0.36));
    Eigen::Vector2cd psi = r * (r * psi0);
    REQUIRE_THAT(std::norm(psi(0)), WithinAbs(std::norm(psi0(0)), 1e-10));
    REQUIRE_THAT(std::norm(psi(1)), WithinAbs(std::norm(psi0(1)), 1e-10));
  }
}

TEST_CASE("echo sequence structure and timing") {
  ForceParams f(kTwoPi * 2e3, kTwoPi * 5e3, 0.0, 0.0, 90e-6);
  SECTION("zero Stark rate gives a plain wait in the second zone") {
    PulseSequence seq = build_echo_sequence(0.3, f, 0.0);
    REQUIRE(seq.pulses.size() == 5);
    REQUIRE(std::holds_alternative<CarrierRotation>(seq.pulses[0]));
    REQUIRE(std::holds_alternative<MsForce>(seq.pulses[1]));
    REQUIRE(std::holds_alternative<CarrierRotation>(seq.pulses[2]));
    REQUIRE(std::holds_alternative<Wait>(seq.pulses[3]));
    REQUIRE(std::holds_alternative<CarrierRotation>(seq.pulses[4]));
    REQUIRE_THAT(std::get<CarrierRotation>(seq.pulses[2]).theta,
                 WithinAbs(kPi, 1e-15));
  }
  SECTION("total duration is 52 us plus two force zones") {
    PulseSequence seq = build_echo_sequence(0.0, f, kTwoPi * 20e3);
    REQUIRE(std::holds_alternative<StarkPhase>(seq.pulses[3]));
    REQUIRE_THAT(seq.total_duration(),
                 WithinAbs(2 * 13e-6 + 26e-6 + 2 * 90e-6, 1e-12));
  }
  SECTION("per-zone Stark phase and its cancellation") {
    const double rate = kTwoPi * 20e3;
    PulseSequence with = build_echo_sequence(0.9, f, rate);
    const auto& stark = std::get<StarkPhase>(with.pulses[3]);
    REQUIRE_THAT(stark.rate * stark.duration,
                 WithinAbs(kTwoPi * 1.8, 1e-9));
    QuantumState initial = up_ground(32);
    BeamSetup setup{BeamGeometry::CoPropagating, ConstantDrift{}};
    PulseSequence ideal = build_echo_sequence(0.9, f, 0.0);
    const double p_comp = run_sequence(initial, with, Engine::Closed, 0.0, setup);
    const double p_ideal =
        run_sequence(initial, ideal, Engine::Closed, 0.0, setup);
    REQUIRE_THAT(p_comp, WithinAbs(p_ideal, 1e-9));
  }
}

TEST_CASE("echo signal basics") {
  ForceParams f(kTwoPi * 6e3, kTwoPi * 2e3, 0.4, 0.0, 250e-6);  // |alpha| = 3
  QuantumState initial = up_ground(default_fock_cutoff(3.0, 0.0));
  BeamSetup setup{BeamGeometry::CoPropagating, ConstantDrift{}};
  SECTION("no cat at phi_o = phi_s") {
    PulseSequence seq = build_echo_sequence(f.phi_s, f, 0.0);
    REQUIRE_THAT(run_sequence(initial, seq, Engine::Closed, 0.0, setup),
                 WithinAbs(0.0, 1e-9));
  }
  SECTION("full fringe a quarter turn away") {
    PulseSequence seq = build_echo_sequence(f.phi_s + kPi / 2.0, f, 0.0);
    REQUIRE_THAT(run_sequence(initial, seq, Engine::Closed, 0.0, setup),
                 WithinAbs(0.5, 1e-6));
  }
}

TEST_CASE("common-mode drift cancels in the co-propagating setup") {
  ForceParams f(kTwoPi * 2e3, kTwoPi * 5e3, 0.2, 0.0, 90e-6);
  QuantumState initial = up_ground(32);
  BeamSetup setup{BeamGeometry::CoPropagating, ConstantDrift{}};
  for (double phi_o : {0.0, 0.9, 2.5}) {
    PulseSequence seq = build_echo_sequence(phi_o, f, 0.0);
    const double base = run_sequence(initial, seq, Engine::Closed, 0.0, setup);
    for (double dphi : {0.7, -1.9, 4.0}) {
      const double shifted =
          run_sequence(initial, seq, Engine::Closed, dphi, setup);
      REQUIRE_THAT(shifted, WithinAbs(base, 1e-8));
    }
  }
}

TEST_CASE("factorized fringe matches the full echo simulation") {
  ForceParams f(kTwoPi * 2e3, kTwoPi * 5e3, 0.4, 0.0, 90e-6);
  BeamSetup setup{BeamGeometry::CoPropagating, ConstantDrift{}};
  SECTION("ground-state ion, closed engine") {
    QuantumState initial = up_ground(32);
    const double pcat = cat_probability(f, 0.0, 0.0, f.tau);
    for (int k = 0; k < 64; ++k) {
      const double phi_o = kTwoPi * k / 64.0;
      PulseSequence seq = build_echo_sequence(phi_o, f, kTwoPi * 20e3);
      const double p = run_sequence(initial, seq, Engine::Closed, 0.0, setup);
      REQUIRE_THAT(p, WithinAbs(ramsey_signal(phi_o, f.phi_s, pcat), 1e-6));
    }
  }
  SECTION("thermal ion, closed engine") {
    FockSpace space(48);
    QuantumState initial = compose_state(Eigen::Vector2cd(1.0, 0.0),
                                         thermal_state(0.05, space));
    const double pcat = cat_probability(f, 0.05, 0.0, f.tau);
    for (int k = 0; k < 16; ++k) {
      const double phi_o = kTwoPi * k / 16.0;
      PulseSequence seq = build_echo_sequence(phi_o, f, 0.0);
      const double p = run_sequence(initial, seq, Engine::Closed, 0.0, setup);
      REQUIRE_THAT(p, WithinAbs(ramsey_signal(phi_o, f.phi_s, pcat), 1e-6));
    }
  }
  SECTION("oracle engine agrees within its cutoff tolerance") {
    QuantumState initial = up_ground(32);
    const double pcat = cat_probability(f, 0.0, 0.0, f.tau);
    for (int k = 0; k < 8; ++k) {
      const double phi_o = kTwoPi * k / 8.0;
      PulseSequence seq = build_echo_sequence(phi_o, f, 0.0);
      const double p = run_sequence(initial, seq, Engine::Oracle, 0.0, setup);
      REQUIRE_THAT(p, WithinAbs(ramsey_signal(phi_o, f.phi_s, pcat), 1e-3));
    }
  }
}

TEST_CASE("phase-insensitive geometry washes the fringe out") {
  ForceParams f(kTwoPi * 2e3, kTwoPi * 5e3, 0.0, 0.0, 90e-6);
  QuantumState initial = up_ground(32);
  BeamSetup setup{BeamGeometry::CounterPropagating, ConstantDrift{}};
  const double pcat = cat_probability(f, 0.0, 0.0, f.tau);
  const int n_drift = 64;
  for (double phi_o : {0.0, 0.8, 1.6, 3.1}) {
    PulseSequence seq = build_echo_sequence(phi_o, f, 0.0);
    double mean = 0.0;
    for (int k = 0; k < n_drift; ++k) {
      mean += run_sequence(initial, seq, Engine::Closed,
                           kTwoPi * k / n_drift, setup);
    }
    mean /= n_drift;
    REQUIRE_THAT(mean, WithinAbs(pcat / 2.0, 0.01));
  }
}

TEST_CASE("uncompensated Stark phase shifts the fringe as predicted") {
  // For |alpha| >> 1 the spin-path algebra gives
  // P = 1/2 - (1/4) cos(theta) - (1/4) cos(2(phi_o - phi_s) - theta)
  // when the compensation pulse is dropped.
  ForceParams f(kTwoPi * 6e3, kTwoPi * 2e3, 0.3, 0.0, 250e-6);  // |alpha| = 3
  const double rate = kTwoPi * 2e3;
  const double theta = rate * f.tau;  // sigma_z phase per zone
  QuantumState initial = up_ground(default_fock_cutoff(3.0, 0.0));
  BeamSetup setup{BeamGeometry::CoPropagating, ConstantDrift{}};
  for (int k = 0; k < 12; ++k) {
    const double phi_o = kTwoPi * k / 12.0;
    PulseSequence seq = build_echo_sequence(phi_o, f, rate, false);
    const double p = run_sequence(initial, seq, Engine::Closed, 0.0, setup);
    const double expected = 0.5 - 0.25 * std::cos(theta) -
                            0.25 * std::cos(2.0 * (phi_o - f.phi_s) - theta);
    REQUIRE_THAT(p, WithinAbs(expected, 1e-6));
  }
  // regression: one frozen point with compensation off
  PulseSequence seq = build_echo_sequence(1.1, f, rate, false);
  const double frozen = run_sequence(initial, seq, Engine::Closed, 0.0, setup);
  const double expected_frozen = 0.5 - 0.25 * std::cos(theta) -
                                 0.25 * std::cos(2.0 * (1.1 - 0.3) - theta);
  REQUIRE_THAT(frozen, WithinAbs(expected_frozen, 1e-6));
}
