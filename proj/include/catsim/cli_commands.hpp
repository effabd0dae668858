#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "catsim/config.hpp"
#include "catsim/scan_io.hpp"
#include "catsim/svg_plot.hpp"

// Command implementations behind the catsim CLI. Kept header-side so the
// acceptance suite can drive them in-process.
//
// Exit codes: 0 success, 1 configuration/input error, 2 numerical or cutoff
// error, 3 fit did not converge (result still written).

namespace catsim {

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> shots;
  std::optional<std::string> out_dir;
  std::optional<std::string> engine;
};

namespace detail {

inline void apply_overrides(RunConfig& cfg, const CliOverrides& overrides) {
  if (overrides.seed) {
    cfg.seed = *overrides.seed;
    cfg.scan.seed = *overrides.seed;
  }
  if (overrides.shots) cfg.scan.shots = *overrides.shots;
  if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
  if (overrides.engine) {
    if (*overrides.engine == "closed") {
      cfg.scan.engine = Engine::Closed;
    } else if (*overrides.engine == "oracle") {
      cfg.scan.engine = Engine::Oracle;
    } else {
      throw ConfigError("--engine must be closed or oracle");
    }
  }
}

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 1;
  return 2;
}

}  // namespace detail

// timescan / freqscan / phasescan: run the configured scan and write
// CSV + JSON + SVG into the output directory.
inline int cmd_scan(ScanKind kind, const std::string& config_path,
                    const CliOverrides& overrides, std::ostream& err) {
  try {
    RunConfig cfg = load_run_config(config_path);
    detail::apply_overrides(cfg, overrides);
    if (cfg.scan.kind != kind) {
      throw ConfigError("config '" + config_path + "' declares scan.kind " +
                        scan_kind_name(cfg.scan.kind) +
                        " but the subcommand expects " + scan_kind_name(kind));
    }
    ScanResult result = run_scan(cfg.scan);
    std::filesystem::create_directories(cfg.out_dir);
    const std::string stem = cfg.out_dir + "/" + scan_kind_name(kind) + "_" +
                             std::to_string(cfg.seed);
    write_file(stem + ".csv", export_csv(result));
    write_file(stem + ".json", export_json(result));
    write_file(stem + ".svg", render_scan_svg(result));
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return detail::exit_code_for(e);
  }
}

// compare-oracle: evaluate the scan's model curve with the closed form and
// the integrated dynamics on a coarse grid, report |delta P| per point, and
// gate on the configured maximum.
inline int cmd_compare_oracle(const std::string& config_path,
                              const CliOverrides& overrides, std::ostream& out,
                              std::ostream& err) {
  try {
    RunConfig cfg = load_run_config(config_path);
    detail::apply_overrides(cfg, overrides);
    if (cfg.scan.kind == ScanKind::Phase) {
      throw ConfigError("compare-oracle supports timescan and detuningscan");
    }
    if (cfg.compare_points < 2) {
      throw ConfigError("compare.points must be >= 2");
    }
    ScanSpec spec = cfg.scan;
    spec.points = cfg.compare_points;
    spec.shots = 0;
    spec.nuisance = ScanNuisance{};
    spec.smoothing_window = 1;

    spec.engine = Engine::Closed;
    ScanResult closed = run_scan(spec);
    spec.engine = Engine::Oracle;
    ScanResult oracle = run_scan(spec);

    double max_diff = 0.0, mean_diff = 0.0;
    nlohmann::json table = nlohmann::json::array();
    out << "   swept             closed        oracle        |diff|\n";
    for (int i = 0; i < spec.points; ++i) {
      const double diff = std::abs(closed.model[i] - oracle.model[i]);
      max_diff = std::max(max_diff, diff);
      mean_diff += diff / spec.points;
      char line[128];
      std::snprintf(line, sizeof(line), "%14.6g %13.9f %13.9f %13.3e\n",
                    closed.swept[i], closed.model[i], oracle.model[i], diff);
      out << line;
      table.push_back({{"swept", closed.swept[i]},
                       {"closed", closed.model[i]},
                       {"oracle", oracle.model[i]},
                       {"diff", diff}});
    }
    const bool pass = max_diff <= cfg.compare_gate;
    out << "max |diff| = " << max_diff << ", mean = " << mean_diff
        << ", gate = " << cfg.compare_gate << (pass ? "  [pass]" : "  [FAIL]")
        << "\n";

    std::filesystem::create_directories(cfg.out_dir);
    nlohmann::json report = {{"kind", scan_kind_name(spec.kind)},
                             {"gate", cfg.compare_gate},
                             {"max_diff", max_diff},
                             {"mean_diff", mean_diff},
                             {"pass", pass},
                             {"points", table}};
    write_file(cfg.out_dir + "/compare_" + std::to_string(cfg.seed) + ".json",
               report.dump(2) + "\n");
    return pass ? 0 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return detail::exit_code_for(e);
  }
}

inline nlohmann::json fit_result_to_json(const FitResult& r) {
  nlohmann::json j;
  j["model"] = fit_model_name(r.kind);
  j["converged"] = r.converged;
  j["uncertainties_ok"] = r.uncertainties_ok;
  j["residual_norm"] = r.residual_norm;
  j["iterations"] = r.iterations;
  j["values"] = r.values;
  j["uncertainties"] = r.uncertainties;
  return j;
}

// fit: read scan data (JSON or CSV by extension) and a fit spec, run the
// fit, print the parameter table, write the result JSON.
inline int cmd_fit(const std::string& data_path,
                   const std::string& fitspec_path,
                   const std::optional<std::string>& out_dir,
                   std::ostream& out, std::ostream& err) {
  try {
    ScanResult data;
    if (data_path.size() >= 4 &&
        data_path.substr(data_path.size() - 4) == ".csv") {
      data = import_scan_csv(data_path);
    } else {
      data = import_scan_json(data_path);
    }
    FitSpec spec = load_fit_spec(fitspec_path);
    FitResult result = fit(data, spec);

    out << "fit model: " << fit_model_name(result.kind)
        << (result.converged ? "" : "   [warning: did not converge]") << "\n";
    out << "residual norm: " << result.residual_norm
        << "  (evaluations: " << result.iterations << ")\n";
    for (const auto& [name, value] : result.values) {
      out << "  " << name << " = " << value;
      auto it = result.uncertainties.find(name);
      if (it != result.uncertainties.end()) {
        out << " +- " << it->second;
      } else if (spec.free.count(name) && !result.uncertainties_ok) {
        out << " (uncertainty unavailable)";
      } else if (spec.fixed.count(name)) {
        out << " (fixed)";
      }
      out << "\n";
    }

    const std::string dir = out_dir.value_or("out");
    std::filesystem::create_directories(dir);
    write_file(dir + "/fitresult_" + fit_model_name(result.kind) + ".json",
               fit_result_to_json(result).dump(2) + "\n");
    return result.converged ? 0 : 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return detail::exit_code_for(e);
  }
}

}  // namespace catsim
