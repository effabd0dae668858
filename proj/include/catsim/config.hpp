#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "catsim/experiment_harness.hpp"
#include "catsim/fitter.hpp"

#include <json.hpp>

// Plain-text run configuration: `key = value` lines with `#` comments.
// Every physical key carries its unit in the name and unknown keys are
// rejected outright.

namespace catsim {

struct RunConfig {
  TrapConfig trap;
  ScanSpec scan;
  double compare_gate = 1e-6;
  int compare_points = 8;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class KeyValueFile {
 public:
  explicit KeyValueFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": expected 'key = value'");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty() || value.empty()) {
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": empty key or value");
      }
      if (!values_.emplace(key, value).second) {
        throw ConfigError(path + ": duplicate key '" + key + "'");
      }
    }
  }

  std::optional<std::string> raw(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  std::string string_or(const std::string& key, const std::string& dflt) {
    auto v = raw(key);
    return v ? *v : dflt;
  }

  double number(const std::string& key) {
    auto v = raw(key);
    if (!v) throw ConfigError("missing required key '" + key + "'");
    return parse_number(key, *v);
  }

  double number_or(const std::string& key, double dflt) {
    auto v = raw(key);
    return v ? parse_number(key, *v) : dflt;
  }

  // every key must have been consumed by the schema
  void reject_unknown() const {
    for (const auto& [key, value] : values_) {
      (void)value;
      if (used_.find(key) == used_.end()) {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  }

 private:
  static double parse_number(const std::string& key, const std::string& v) {
    std::istringstream in(v);
    double out;
    in >> out;
    if (!in || !(in >> std::ws).eof()) {
      throw ConfigError("key '" + key + "': cannot parse number from '" + v +
                        "'");
    }
    return out;
  }

  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

}  // namespace detail

inline RunConfig load_run_config(const std::string& path) {
  detail::KeyValueFile file(path);
  RunConfig cfg;

  const double mass_u =
      file.number_or("trap.mass_u", constants::kCd111IonMassU);
  const double omega_z =
      constants::kTwoPi * 1e6 * file.number_or("trap.omega_z_mhz", 3.55);
  const double nbar = file.number_or("trap.nbar", constants::kDopplerNbar);
  const double ndot = 1e3 * file.number_or("trap.ndot_per_ms", 0.2);
  cfg.trap = TrapConfig(mass_u * constants::kAtomicMassKg, omega_z, nbar, ndot);
  cfg.trap.omega_hf =
      constants::kTwoPi * 1e9 * file.number_or("trap.omega_hf_ghz", 14.53);

  const std::string kind = file.string_or("scan.kind", "");
  if (kind.empty()) throw ConfigError("missing required key 'scan.kind'");
  if (kind == "timescan") {
    cfg.scan.kind = ScanKind::Time;
  } else if (kind == "detuningscan") {
    cfg.scan.kind = ScanKind::Detuning;
  } else if (kind == "phasescan") {
    cfg.scan.kind = ScanKind::Phase;
  } else {
    throw ConfigError("scan.kind must be timescan, detuningscan or phasescan");
  }

  const double omega_sb =
      constants::kTwoPi * 1e3 * file.number("force.omega_sb_khz");
  const double tau = 1e-6 * file.number("force.tau_us");
  double delta = 0.0;
  if (cfg.scan.kind == ScanKind::Detuning) {
    // swept; a force default is accepted but not required
    delta = constants::kTwoPi * 1e3 * file.number_or("force.delta_khz", 1.0);
  } else {
    delta = constants::kTwoPi * 1e3 * file.number("force.delta_khz");
  }
  cfg.scan.force =
      ForceParams(omega_sb, delta, file.number_or("force.phi_s_rad", 0.0),
                  file.number_or("force.phi_m_rad", 0.0), tau);
  cfg.scan.trap = cfg.trap;

  switch (cfg.scan.kind) {
    case ScanKind::Time:
      cfg.scan.start = 1e-6 * file.number("scan.tau_start_us");
      cfg.scan.stop = 1e-6 * file.number("scan.tau_stop_us");
      break;
    case ScanKind::Detuning:
      cfg.scan.start =
          constants::kTwoPi * 1e3 * file.number("scan.delta_start_khz");
      cfg.scan.stop =
          constants::kTwoPi * 1e3 * file.number("scan.delta_stop_khz");
      break;
    case ScanKind::Phase:
      cfg.scan.start = file.number("scan.phi_start_rad");
      cfg.scan.stop = file.number("scan.phi_stop_rad");
      cfg.scan.stark_rate =
          constants::kTwoPi * 1e3 * file.number_or("scan.stark_rate_khz", 20.0);
      break;
  }
  cfg.scan.points = static_cast<int>(file.number("scan.points"));
  cfg.scan.shots = static_cast<int>(file.number_or("scan.shots", 100.0));
  cfg.scan.smoothing_window =
      static_cast<int>(file.number_or("scan.smoothing_window", 3.0));
  cfg.scan.wall_time_per_point =
      1e-3 * file.number_or("scan.wall_time_per_point_ms", 200.0);

  const std::string engine = file.string_or("scan.engine", "closed");
  if (engine == "closed") {
    cfg.scan.engine = Engine::Closed;
  } else if (engine == "oracle") {
    cfg.scan.engine = Engine::Oracle;
  } else {
    throw ConfigError("scan.engine must be closed or oracle");
  }

  const std::string geometry = file.string_or("scan.geometry", "co");
  if (geometry == "co") {
    cfg.scan.setup.geometry = BeamGeometry::CoPropagating;
  } else if (geometry == "counter") {
    cfg.scan.setup.geometry = BeamGeometry::CounterPropagating;
  } else {
    throw ConfigError("scan.geometry must be co or counter");
  }

  const std::string drift = file.string_or("drift.kind", "none");
  if (drift == "none") {
    cfg.scan.setup.drift = ConstantDrift{0.0};
  } else if (drift == "constant") {
    cfg.scan.setup.drift = ConstantDrift{file.number("drift.offset_rad")};
  } else if (drift == "sinusoid") {
    cfg.scan.setup.drift =
        SinusoidDrift{file.number("drift.amplitude_rad"),
                      file.number("drift.frequency_hz"),
                      file.number_or("drift.phase_rad", 0.0)};
  } else if (drift == "randomwalk") {
    cfg.scan.setup.drift =
        RandomWalkDrift{file.number("drift.diffusion_rad2_per_s"), 0};
  } else {
    throw ConfigError(
        "drift.kind must be none, constant, sinusoid or randomwalk");
  }

  cfg.scan.nuisance.detuning_drift =
      constants::kTwoPi * 1e3 *
      file.number_or("nuisance.detuning_drift_khz", 0.0);
  cfg.scan.nuisance.peak_drift = file.number_or("nuisance.peak_drift", 0.0);
  cfg.scan.nuisance.contrast_drift =
      file.number_or("nuisance.contrast_drift", 0.0);

  cfg.compare_gate = file.number_or("compare.gate", 1e-6);
  cfg.compare_points = static_cast<int>(file.number_or("compare.points", 8.0));

  cfg.seed = static_cast<std::uint64_t>(file.number_or("seed", 0.0));
  cfg.scan.seed = cfg.seed;
  cfg.out_dir = file.string_or("out_dir", "out");

  file.reject_unknown();
  cfg.scan.validate();
  return cfg;
}

// Fit specification document:
// {"model": "...", "fixed": {...}, "free": {"name": {"init": x, "min": a,
// "max": b}}}
inline FitSpec load_fit_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open fit spec '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
  FitSpec spec;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key != "model" && key != "fixed" && key != "free") {
        throw ConfigError("unknown fit spec key '" + key + "'");
      }
      (void)value;
    }
    spec.kind = parse_fit_model(j.at("model").get<std::string>());
    if (j.contains("fixed")) {
      for (const auto& [name, value] : j.at("fixed").items()) {
        spec.fixed[name] = value.get<double>();
      }
    }
    if (j.contains("free")) {
      for (const auto& [name, value] : j.at("free").items()) {
        FreeParam p;
        for (const auto& [k, v] : value.items()) {
          (void)v;
          if (k != "init" && k != "min" && k != "max") {
            throw ConfigError("unknown free-parameter key '" + k + "' in '" +
                              name + "'");
          }
        }
        p.init = value.at("init").get<double>();
        if (value.contains("min")) p.lower = value.at("min").get<double>();
        if (value.contains("max")) p.upper = value.at("max").get<double>();
        spec.free[name] = p;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed fit spec '" + path + "': " + e.what());
  }
  spec.validate();
  return spec;
}

}  // namespace catsim
