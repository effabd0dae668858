#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "catsim/beam_noise.hpp"
#include "catsim/lindblad_oracle.hpp"
#include "catsim/ms_dynamics.hpp"
#include "catsim/pulse_engine.hpp"

// Parameter scans with shot sampling: the force-duration scan, the detuning
// scan, and the echo-interferometer phase scan, with per-scan nuisance
// drifts (detuning drift, linear peak/contrast change) and optical-phase
// drift injection.

namespace catsim {

enum class ScanKind { Time, Detuning, Phase };

inline std::string scan_kind_name(ScanKind kind) {
  switch (kind) {
    case ScanKind::Time: return "timescan";
    case ScanKind::Detuning: return "detuningscan";
    case ScanKind::Phase: return "phasescan";
  }
  return "unknown";
}

// Slow drifts across a scan, parameterized by the scan fraction u in [0,1]:
// the effective detuning gains detuning_drift * u and the signal envelope
// becomes (0.5 + peak_drift u)(1 - (1 + contrast_drift u) e^E).
struct ScanNuisance {
  double detuning_drift = 0.0;  // rad/s accumulated over the scan
  double peak_drift = 0.0;
  double contrast_drift = 0.0;
};

struct ScanSpec {
  ScanKind kind = ScanKind::Detuning;
  double start = 0.0;  // s (time), rad/s (detuning), rad (phase)
  double stop = 0.0;
  int points = 2;
  int shots = 100;     // 0 = infinite-shot sentinel: exact model output
  Engine engine = Engine::Closed;
  BeamSetup setup;
  ForceParams force{1.0, 1.0};
  TrapConfig trap;     // nbar and ndot ride along here
  ScanNuisance nuisance;
  int smoothing_window = 3;
  std::uint64_t seed = 0;
  double wall_time_per_point = 0.2;  // s, sets the drift clock
  double stark_rate = 0.0;           // rad/s, phase scans only

  void validate() const {
    if (points < 2) throw ConfigError("scan needs at least 2 points");
    if (shots < 0) throw ConfigError("shots must be >= 0");
    if (smoothing_window < 1 || smoothing_window % 2 == 0 ||
        smoothing_window > points) {
      throw ConfigError("smoothing window must be odd and <= points");
    }
    if (wall_time_per_point <= 0.0) {
      throw ConfigError("wall time per point must be positive");
    }
  }
};

struct ScanResult {
  ScanKind kind = ScanKind::Detuning;
  std::vector<double> swept;
  std::vector<double> model;     // noiseless model probabilities
  std::vector<double> estimate;  // shot-sampled fractions
  std::vector<double> smoothed;
  std::vector<double> drift;     // per-point optical phase drift sample, rad
  std::uint64_t seed = 0;
  int shots = 0;
  int smoothing_window = 3;
  std::string engine = "closed";
  std::string geometry = "co";
  std::string timestamp;  // excluded from determinism comparisons
  // generator parameters echoed into exports
  double omega_sb = 0, delta = 0, phi_s = 0, phi_m = 0, tau = 0;
  double nbar = 0, ndot = 0;
  ScanNuisance nuisance;
};

// Centered moving average with the window shrinking at the edges.
inline std::vector<double> smooth(const std::vector<double>& values,
                                  int window) {
  if (window < 1 || window % 2 == 0 ||
      window > static_cast<int>(values.size())) {
    throw ConfigError("smoothing window must be odd and <= series length");
  }
  const int half = window / 2;
  const int n = static_cast<int>(values.size());
  std::vector<double> out(values.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    double acc = 0.0;
    for (int k = lo; k <= hi; ++k) acc += values[k];
    out[i] = acc / (hi - lo + 1);
  }
  return out;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Bernoulli-sum binomial sampler; portable across standard libraries.
inline int binomial_draw(std::mt19937_64& rng, int n, double p) {
  int count = 0;
  for (int k = 0; k < n; ++k) {
    if (uniform_unit(rng) < p) ++count;
  }
  return count;
}

inline int harness_threads() {
  if (const char* env = std::getenv("CATSIM_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

template <typename Fn>
inline void parallel_for(int n, Fn&& fn) {
  const int nthreads = std::min(harness_threads(), n);
  if (nthreads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < nthreads; ++t) {
    workers.emplace_back([&]() {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Eq.-2 signal with the nuisance envelope applied at scan fraction u.
inline double enveloped_cat_signal(const ForceParams& f, const ScanSpec& spec,
                                   double tau, double u) {
  const double pcat = cat_probability(f, spec.trap.nbar, spec.trap.ndot, tau);
  if (spec.nuisance.peak_drift == 0.0 && spec.nuisance.contrast_drift == 0.0) {
    return pcat;
  }
  const double decay = 1.0 - 2.0 * pcat;  // e^{E}
  const double peak = 0.5 + spec.nuisance.peak_drift * u;
  const double contrast = 1.0 + spec.nuisance.contrast_drift * u;
  return peak * (1.0 - contrast * decay);
}

// Echo signal for a phase-scan point: reference phase phi_o and drift sample
// delta_phi mapped through the beam geometry. The closed-form engine uses
// the factorized signal (equivalent to the full echo simulation to <= 1e-6,
// enforced by tests); the oracle engine runs the sequence by integration.
inline double phase_scan_signal(const ScanSpec& spec, double phi_o,
                                double delta_phi) {
  const auto [phi_r, phi_b] = sideband_phases(spec.setup, delta_phi);
  const auto [phi_s_shift, phi_m_shift] = ms_phases(phi_r, phi_b);
  if (spec.engine == Engine::Closed) {
    const double pcat = cat_probability(spec.force, spec.trap.nbar,
                                        spec.trap.ndot, spec.force.tau);
    return ramsey_signal(phi_o + delta_phi,
                         spec.force.phi_s + phi_s_shift, pcat);
  }
  const int cutoff = default_fock_cutoff(
      max_alpha_abs(spec.force, spec.force.tau), spec.trap.nbar);
  FockSpace space(cutoff);
  QuantumState initial = compose_state(
      Eigen::Vector2cd(1.0, 0.0),
      thermal_state(spec.trap.nbar, space),
      spec.trap.nbar == 0.0);
  PulseSequence seq =
      build_echo_sequence(phi_o, spec.force, spec.stark_rate);
  return run_sequence(initial, seq, Engine::Oracle, delta_phi, spec.setup);
}

}  // namespace detail

// Run a scan: evaluate the model at each swept value with nuisance drifts
// applied progressively, then draw shot samples. Deterministic under seed.
// Errors from the engines propagate with the point index attached.
inline ScanResult run_scan(const ScanSpec& spec) {
  spec.validate();
  const int points = spec.points;
  const int shots = spec.shots;

  ScanResult result;
  result.kind = spec.kind;
  result.seed = spec.seed;
  result.shots = shots;
  result.smoothing_window = spec.smoothing_window;
  result.engine = (spec.engine == Engine::Closed) ? "closed" : "oracle";
  result.geometry = (spec.setup.geometry == BeamGeometry::CoPropagating)
                        ? "co"
                        : "counter";
  result.timestamp = detail::utc_timestamp();
  result.omega_sb = spec.force.omega_sb;
  result.delta = spec.force.delta;
  result.phi_s = spec.force.phi_s;
  result.phi_m = spec.force.phi_m;
  result.tau = spec.force.tau;
  result.nbar = spec.trap.nbar;
  result.ndot = spec.trap.ndot;
  result.nuisance = spec.nuisance;

  result.swept.resize(points);
  for (int i = 0; i < points; ++i) {
    result.swept[i] =
        spec.start + (spec.stop - spec.start) * i / (points - 1);
  }

  // Drift path, sampled serially over the wall-clock shot times. A seeded
  // random walk gets its seed from the scan seed.
  DriftProcess process = spec.setup.drift;
  if (auto* walk = std::get_if<RandomWalkDrift>(&process)) {
    walk->seed = detail::splitmix64(spec.seed ^ 0xd41f7b2c9e5a3701ULL);
  }
  const int samples_per_point = std::max(shots, 1);
  std::vector<double> times(static_cast<std::size_t>(points) *
                            samples_per_point);
  const double shot_dt = spec.wall_time_per_point / samples_per_point;
  for (int i = 0; i < points; ++i) {
    for (int s = 0; s < samples_per_point; ++s) {
      times[i * samples_per_point + s] =
          i * spec.wall_time_per_point + s * shot_dt;
    }
  }
  const std::vector<double> drift_path = sample_drift(process, times);

  result.model.resize(points);
  result.estimate.resize(points);
  result.drift.resize(points);

  detail::parallel_for(points, [&](int i) {
    try {
      const double u = static_cast<double>(i) / (points - 1);
      const double x = result.swept[i];
      const double point_drift = drift_path[i * samples_per_point];
      result.drift[i] = point_drift;
      std::mt19937_64 rng(
          detail::splitmix64(spec.seed ^ detail::splitmix64(i + 1)));

      if (spec.kind == ScanKind::Phase) {
        result.model[i] = detail::phase_scan_signal(spec, x, point_drift);
        if (shots == 0) {
          result.estimate[i] = result.model[i];
        } else {
          int count = 0;
          for (int s = 0; s < shots; ++s) {
            const double p = detail::phase_scan_signal(
                spec, x, drift_path[i * samples_per_point + s]);
            if (detail::uniform_unit(rng) < p) ++count;
          }
          result.estimate[i] = static_cast<double>(count) / shots;
        }
        return;
      }

      ForceParams f = spec.force;
      if (spec.kind == ScanKind::Time) {
        f.tau = x;
        f.delta = spec.force.delta + spec.nuisance.detuning_drift * u;
      } else {
        f.delta = x + spec.nuisance.detuning_drift * u;
      }

      double p_model;
      if (spec.engine == Engine::Closed) {
        p_model = detail::enveloped_cat_signal(f, spec, f.tau, u);
      } else {
        const int cutoff =
            default_fock_cutoff(max_alpha_abs(f, f.tau), spec.trap.nbar);
        FockSpace space(cutoff);
        QuantumState initial = compose_state(
            Eigen::Vector2cd(1.0, 0.0), thermal_state(spec.trap.nbar, space),
            spec.trap.nbar == 0.0);
        IntegratorSpec ispec =
            IntegratorSpec::for_force(f, spec.trap.nbar, spec.trap.ndot);
        const QuantumState evolved = evolve(initial, f, ispec);
        p_model = spin_populations(evolved).second;
      }
      result.model[i] = p_model;
      if (shots == 0) {
        result.estimate[i] = p_model;
      } else {
        result.estimate[i] =
            static_cast<double>(detail::binomial_draw(rng, shots, p_model)) /
            shots;
      }
    } catch (const std::exception& e) {
      throw NumericsError("scan point " + std::to_string(i) + ": " + e.what());
    }
  });

  result.smoothed = smooth(result.estimate, spec.smoothing_window);
  return result;
}

}  // namespace catsim
