#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "catsim/experiment_harness.hpp"

#include <json.hpp>

// CSV and JSON serialization of scan results. CSV columns are
// swept,model,estimate,smoothed,drift at 17 significant digits; JSON mirrors
// the full ScanResult including generator metadata.

namespace catsim {

namespace detail {

inline std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string export_csv(const ScanResult& r) {
  std::ostringstream out;
  out << "swept,model,estimate,smoothed,drift\n";
  for (std::size_t i = 0; i < r.swept.size(); ++i) {
    out << detail::format_g17(r.swept[i]) << ','
        << detail::format_g17(r.model[i]) << ','
        << detail::format_g17(r.estimate[i]) << ','
        << detail::format_g17(r.smoothed[i]) << ','
        << detail::format_g17(r.drift[i]) << '\n';
  }
  return out.str();
}

inline nlohmann::json scan_to_json(const ScanResult& r) {
  nlohmann::json j;
  j["kind"] = scan_kind_name(r.kind);
  j["metadata"] = {
      {"seed", r.seed},
      {"shots", r.shots},
      {"smoothing_window", r.smoothing_window},
      {"engine", r.engine},
      {"geometry", r.geometry},
      {"timestamp", r.timestamp},
      {"omega_sb_rad_s", r.omega_sb},
      {"delta_rad_s", r.delta},
      {"phi_s_rad", r.phi_s},
      {"phi_m_rad", r.phi_m},
      {"tau_s", r.tau},
      {"nbar", r.nbar},
      {"ndot_per_s", r.ndot},
      {"detuning_drift_rad_s", r.nuisance.detuning_drift},
      {"peak_drift", r.nuisance.peak_drift},
      {"contrast_drift", r.nuisance.contrast_drift},
  };
  j["data"] = {
      {"swept", r.swept},       {"model", r.model},
      {"estimate", r.estimate}, {"smoothed", r.smoothed},
      {"drift", r.drift},
  };
  return j;
}

inline std::string export_json(const ScanResult& r) {
  return scan_to_json(r).dump(2) + "\n";
}

inline ScanKind parse_scan_kind(const std::string& name) {
  if (name == "timescan") return ScanKind::Time;
  if (name == "detuningscan") return ScanKind::Detuning;
  if (name == "phasescan") return ScanKind::Phase;
  throw ConfigError("unknown scan kind '" + name + "'");
}

inline ScanResult scan_from_json(const nlohmann::json& j) {
  ScanResult r;
  try {
    r.kind = parse_scan_kind(j.at("kind").get<std::string>());
    const auto& meta = j.at("metadata");
    r.seed = meta.at("seed").get<std::uint64_t>();
    r.shots = meta.at("shots").get<int>();
    r.smoothing_window = meta.at("smoothing_window").get<int>();
    r.engine = meta.at("engine").get<std::string>();
    r.geometry = meta.at("geometry").get<std::string>();
    r.timestamp = meta.at("timestamp").get<std::string>();
    r.omega_sb = meta.at("omega_sb_rad_s").get<double>();
    r.delta = meta.at("delta_rad_s").get<double>();
    r.phi_s = meta.at("phi_s_rad").get<double>();
    r.phi_m = meta.at("phi_m_rad").get<double>();
    r.tau = meta.at("tau_s").get<double>();
    r.nbar = meta.at("nbar").get<double>();
    r.ndot = meta.at("ndot_per_s").get<double>();
    r.nuisance.detuning_drift = meta.at("detuning_drift_rad_s").get<double>();
    r.nuisance.peak_drift = meta.at("peak_drift").get<double>();
    r.nuisance.contrast_drift = meta.at("contrast_drift").get<double>();
    const auto& data = j.at("data");
    r.swept = data.at("swept").get<std::vector<double>>();
    r.model = data.at("model").get<std::vector<double>>();
    r.estimate = data.at("estimate").get<std::vector<double>>();
    r.smoothed = data.at("smoothed").get<std::vector<double>>();
    r.drift = data.at("drift").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed scan JSON: ") + e.what());
  }
  if (r.model.size() != r.swept.size() ||
      r.estimate.size() != r.swept.size() ||
      r.smoothed.size() != r.swept.size() ||
      r.drift.size() != r.swept.size()) {
    throw ConfigError("scan JSON arrays have mismatched lengths");
  }
  return r;
}

inline ScanResult import_scan_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scan file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
  return scan_from_json(j);
}

// Minimal CSV import: only the data columns are recoverable.
inline ScanResult import_scan_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scan file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) ||
      line != "swept,model,estimate,smoothed,drift") {
    throw ConfigError("'" + path + "' is not a scan CSV (bad header)");
  }
  ScanResult r;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    double v[5];
    char comma;
    row >> v[0];
    for (int k = 1; k < 5; ++k) {
      row >> comma >> v[k];
      if (comma != ',') row.setstate(std::ios::failbit);
    }
    if (!row) {
      throw ConfigError("'" + path + "': malformed CSV row at line " +
                        std::to_string(lineno));
    }
    r.swept.push_back(v[0]);
    r.model.push_back(v[1]);
    r.estimate.push_back(v[2]);
    r.smoothed.push_back(v[3]);
    r.drift.push_back(v[4]);
  }
  if (r.swept.size() < 2) {
    throw ConfigError("'" + path + "' holds fewer than 2 data rows");
  }
  return r;
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << contents;
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

}  // namespace catsim
