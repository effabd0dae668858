#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "catsim/constants.hpp"
#include "catsim/errors.hpp"

// Raman-beam geometry and optical phase fluctuations: how a common phase
// fluctuation delta_phi on the red/blue sideband pair maps onto the force's
// spin and motional phases, plus seeded drift processes for scans.

namespace catsim {

enum class BeamGeometry { CoPropagating, CounterPropagating };

struct ConstantDrift {
  double offset = 0.0;  // rad
};

struct SinusoidDrift {
  double amplitude = 0.0;  // rad
  double frequency = 0.0;  // Hz
  double phase = 0.0;      // rad
};

struct RandomWalkDrift {
  double diffusion = 1.0;  // rad^2/s
  std::uint64_t seed = 0;
};

using DriftProcess = std::variant<ConstantDrift, SinusoidDrift, RandomWalkDrift>;

struct BeamSetup {
  BeamGeometry geometry = BeamGeometry::CoPropagating;
  DriftProcess drift = ConstantDrift{};
};

// Red/blue sideband phases picked up from a common fluctuation delta_phi.
// Co-propagating beat waves see it with the same sign on both sidebands;
// counter-propagating ones with opposite signs.
inline std::pair<double, double> sideband_phases(const BeamSetup& setup,
                                                 double delta_phi) {
  if (setup.geometry == BeamGeometry::CoPropagating) {
    return {delta_phi, delta_phi};
  }
  return {-delta_phi, delta_phi};
}

// Wrap to (-pi, pi].
inline double wrap_phase(double x) {
  double y = std::fmod(x + constants::kPi, constants::kTwoPi);
  if (y <= 0.0) y += constants::kTwoPi;
  return y - constants::kPi;
}

// Spin and motional phases of the force: half-sum and half-difference of the
// sideband phases, wrapped to (-pi, pi].
inline std::pair<double, double> ms_phases(double phi_r, double phi_b) {
  return {wrap_phase(0.5 * (phi_b + phi_r)), wrap_phase(0.5 * (phi_b - phi_r))};
}

namespace detail {

// Uniform double in [0,1) from the top 53 bits; identical across platforms.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller standard normal (one value per call; the partner is discarded
// to keep sampling stateless).
inline double standard_normal(std::mt19937_64& rng) {
  double u1 = uniform_unit(rng);
  while (u1 <= 0.0) u1 = uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(constants::kTwoPi * u2);
}

}  // namespace detail

// Sample a drift process at the given ascending times. A random walk starts
// at zero at t = 0 and accumulates Gaussian increments of variance
// diffusion * dt; the same seed and times reproduce the same samples bit for
// bit.
inline std::vector<double> sample_drift(const DriftProcess& process,
                                        const std::vector<double>& times) {
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    if (times[k + 1] <= times[k]) {
      throw ConfigError("drift sample times must be strictly ascending");
    }
  }
  std::vector<double> out;
  out.reserve(times.size());
  if (const auto* c = std::get_if<ConstantDrift>(&process)) {
    out.assign(times.size(), c->offset);
  } else if (const auto* s = std::get_if<SinusoidDrift>(&process)) {
    for (double t : times) {
      out.push_back(s->amplitude *
                    std::sin(constants::kTwoPi * s->frequency * t + s->phase));
    }
  } else {
    const auto& walk = std::get<RandomWalkDrift>(process);
    std::mt19937_64 rng(walk.seed);
    double value = 0.0, prev = 0.0;
    for (double t : times) {
      const double dt = t - prev;
      if (dt > 0.0) {
        value += std::sqrt(walk.diffusion * dt) * detail::standard_normal(rng);
      }
      prev = t;
      out.push_back(value);
    }
  }
  return out;
}

}  // namespace catsim
