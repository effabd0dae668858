#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "catsim/cli_commands.hpp"

using namespace catsim;
using Catch::Matchers::WithinAbs;

namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  const std::string path = (fs::temp_directory_path() / name).string();
  std::ofstream out(path);
  out << body;
  return path;
}

const char* kTinyPhaseConfig = R"(
trap.nbar = 0
trap.ndot_per_ms = 0
force.omega_sb_khz = 2
force.delta_khz = 5
force.tau_us = 90
scan.kind = phasescan
scan.phi_start_rad = 0
scan.phi_stop_rad = 6.283185307179586
scan.points = 17
scan.shots = 50
scan.geometry = co
seed = 11
)";

const char* kTinyTimeConfig = R"(
trap.nbar = 0
trap.ndot_per_ms = 0
force.omega_sb_khz = 2
force.delta_khz = 5
force.tau_us = 200
scan.kind = timescan
scan.tau_start_us = 40
scan.tau_stop_us = 160
scan.points = 4
scan.shots = 0
compare.gate = 1e-6
compare.points = 4
seed = 12
)";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("shipped configs parse") {
  for (const char* name :
       {"fig2.cfg", "fig3a.cfg", "fig3b.cfg", "fig4b.cfg", "fig4c.cfg"}) {
    const std::string path = std::string(CATSIM_CONFIG_DIR "/") + name;
    REQUIRE_NOTHROW(load_run_config(path));
  }
  RunConfig fig2 = load_run_config(CATSIM_CONFIG_DIR "/fig2.cfg");
  REQUIRE(fig2.scan.kind == ScanKind::Time);
  REQUIRE_THAT(fig2.scan.force.omega_sb / (constants::kTwoPi * 1e3),
               WithinAbs(2.2, 1e-12));
  REQUIRE_THAT(fig2.trap.nbar, WithinAbs(8.1, 1e-12));
  RunConfig fig4c = load_run_config(CATSIM_CONFIG_DIR "/fig4c.cfg");
  REQUIRE(fig4c.scan.setup.geometry == BeamGeometry::CounterPropagating);
  REQUIRE(std::holds_alternative<RandomWalkDrift>(fig4c.scan.setup.drift));
}

TEST_CASE("strict config parsing") {
  SECTION("unknown key") {
    const std::string path = write_temp(
        "catsim_unknown.cfg",
        std::string(kTinyTimeConfig) + "\nbogus.key = 3\n");
    REQUIRE_THROWS_WITH(load_run_config(path),
                        Catch::Matchers::ContainsSubstring("bogus.key"));
  }
  SECTION("keys from another scan kind are rejected") {
    const std::string path = write_temp(
        "catsim_mixed.cfg",
        std::string(kTinyTimeConfig) + "\nscan.phi_start_rad = 0\n");
    REQUIRE_THROWS_AS(load_run_config(path), ConfigError);
  }
  SECTION("duplicate key") {
    const std::string path = write_temp(
        "catsim_dup.cfg", std::string(kTinyTimeConfig) + "\nseed = 13\n");
    REQUIRE_THROWS_AS(load_run_config(path), ConfigError);
  }
  SECTION("missing required key") {
    const std::string path =
        write_temp("catsim_missing.cfg", "scan.kind = timescan\n");
    REQUIRE_THROWS_AS(load_run_config(path), ConfigError);
  }
  SECTION("bad number") {
    const std::string path = write_temp(
        "catsim_badnum.cfg",
        std::string(kTinyTimeConfig) + "\nnuisance.peak_drift = fast\n");
    REQUIRE_THROWS_AS(load_run_config(path), ConfigError);
  }
}

TEST_CASE("scan command writes csv, json and svg") {
  const std::string cfg = write_temp("catsim_phase.cfg", kTinyPhaseConfig);
  const std::string out =
      (fs::temp_directory_path() / "catsim_out_scan").string();
  fs::remove_all(out);
  CliOverrides overrides;
  overrides.out_dir = out;
  std::ostringstream err;
  REQUIRE(cmd_scan(ScanKind::Phase, cfg, overrides, err) == 0);
  REQUIRE(fs::exists(out + "/phasescan_11.csv"));
  REQUIRE(fs::exists(out + "/phasescan_11.json"));
  REQUIRE(fs::exists(out + "/phasescan_11.svg"));
  const std::string svg = read_file(out + "/phasescan_11.svg");
  REQUIRE(svg.find("<svg") != std::string::npos);
  REQUIRE(svg.find("polyline") != std::string::npos);
}

TEST_CASE("scan command failure modes") {
  std::ostringstream err;
  SECTION("missing config exits 1 with no partial outputs") {
    const std::string out =
        (fs::temp_directory_path() / "catsim_out_missing").string();
    fs::remove_all(out);
    CliOverrides overrides;
    overrides.out_dir = out;
    REQUIRE(cmd_scan(ScanKind::Time, "/nonexistent.cfg", overrides, err) == 1);
    REQUIRE(!fs::exists(out));
  }
  SECTION("subcommand and config kind must agree") {
    const std::string cfg = write_temp("catsim_phase2.cfg", kTinyPhaseConfig);
    CliOverrides overrides;
    REQUIRE(cmd_scan(ScanKind::Time, cfg, overrides, err) == 1);
  }
  SECTION("numerical errors exit 2") {
    // detuning grid crossing zero exactly
    const std::string cfg = write_temp("catsim_zero.cfg", R"(
trap.nbar = 0
force.omega_sb_khz = 2
force.tau_us = 100
scan.kind = detuningscan
scan.delta_start_khz = -1
scan.delta_stop_khz = 1
scan.points = 3
scan.shots = 0
seed = 1
)");
    CliOverrides overrides;
    overrides.out_dir =
        (fs::temp_directory_path() / "catsim_out_zero").string();
    REQUIRE(cmd_scan(ScanKind::Detuning, cfg, overrides, err) == 2);
  }
}

TEST_CASE("shots override selects the exact model curve") {
  const std::string cfg = write_temp("catsim_phase3.cfg", kTinyPhaseConfig);
  const std::string out =
      (fs::temp_directory_path() / "catsim_out_exact").string();
  fs::remove_all(out);
  CliOverrides overrides;
  overrides.out_dir = out;
  overrides.shots = 0;
  std::ostringstream err;
  REQUIRE(cmd_scan(ScanKind::Phase, cfg, overrides, err) == 0);
  ScanResult r = import_scan_json(out + "/phasescan_11.json");
  REQUIRE(r.estimate == r.model);
}

TEST_CASE("same config and seed give byte-identical outputs") {
  const std::string cfg = write_temp("catsim_phase4.cfg", kTinyPhaseConfig);
  std::ostringstream err;
  const std::string out_a =
      (fs::temp_directory_path() / "catsim_det_a").string();
  const std::string out_b =
      (fs::temp_directory_path() / "catsim_det_b").string();
  fs::remove_all(out_a);
  fs::remove_all(out_b);
  CliOverrides a, b;
  a.out_dir = out_a;
  b.out_dir = out_b;
  REQUIRE(cmd_scan(ScanKind::Phase, cfg, a, err) == 0);
  REQUIRE(cmd_scan(ScanKind::Phase, cfg, b, err) == 0);
  REQUIRE(read_file(out_a + "/phasescan_11.csv") ==
          read_file(out_b + "/phasescan_11.csv"));
  REQUIRE(read_file(out_a + "/phasescan_11.svg") ==
          read_file(out_b + "/phasescan_11.svg"));
  nlohmann::json ja = nlohmann::json::parse(read_file(out_a + "/phasescan_11.json"));
  nlohmann::json jb = nlohmann::json::parse(read_file(out_b + "/phasescan_11.json"));
  ja["metadata"].erase("timestamp");
  jb["metadata"].erase("timestamp");
  REQUIRE(ja == jb);
}

TEST_CASE("compare-oracle gates on the configured threshold") {
  std::ostringstream out, err;
  SECTION("pure dynamics pass a tight gate") {
    const std::string cfg = write_temp("catsim_cmp.cfg", kTinyTimeConfig);
    CliOverrides overrides;
    overrides.out_dir =
        (fs::temp_directory_path() / "catsim_out_cmp").string();
    REQUIRE(cmd_compare_oracle(cfg, overrides, out, err) == 0);
    REQUIRE(out.str().find("[pass]") != std::string::npos);
  }
  SECTION("an impossible gate with heating fails") {
    std::string heated(kTinyTimeConfig);
    const auto pos = heated.find("trap.ndot_per_ms = 0");
    heated.replace(pos, 20, "trap.ndot_per_ms = 1");
    const auto gate = heated.find("compare.gate = 1e-6");
    heated.replace(gate, 19, "compare.gate = 1e-9");
    const std::string cfg = write_temp("catsim_cmp_fail.cfg", heated);
    CliOverrides overrides;
    overrides.out_dir =
        (fs::temp_directory_path() / "catsim_out_cmpf").string();
    REQUIRE(cmd_compare_oracle(cfg, overrides, out, err) == 2);
  }
  SECTION("phase scans are not comparable") {
    const std::string cfg = write_temp("catsim_cmp_ph.cfg", kTinyPhaseConfig);
    CliOverrides overrides;
    REQUIRE(cmd_compare_oracle(cfg, overrides, out, err) == 1);
  }
}

TEST_CASE("fit command round trip through files") {
  std::ostringstream out, err;
  const std::string outdir =
      (fs::temp_directory_path() / "catsim_out_fit").string();
  fs::remove_all(outdir);

  // generate a noiseless cold detuning scan
  const std::string cfg = write_temp("catsim_fit_scan.cfg", R"(
trap.nbar = 0.05
trap.ndot_per_ms = 0.44
force.omega_sb_khz = 1.62
force.tau_us = 500
scan.kind = detuningscan
scan.delta_start_khz = -12
scan.delta_stop_khz = 12
scan.points = 240
scan.shots = 0
seed = 99
)");
  CliOverrides overrides;
  overrides.out_dir = outdir;
  REQUIRE(cmd_scan(ScanKind::Detuning, cfg, overrides, err) == 0);

  SECTION("JSON data path recovers the generator to 0.1 percent") {
    REQUIRE(cmd_fit(outdir + "/detuningscan_99.json",
                    CATSIM_CONFIG_DIR "/fig3a_fit.json", outdir, out,
                    err) == 0);
    nlohmann::json j = nlohmann::json::parse(
        read_file(outdir + "/fitresult_detuningscan.json"));
    REQUIRE(j.at("converged").get<bool>());
    REQUIRE_THAT(j.at("values").at("omega_sb_khz").get<double>(),
                 WithinAbs(1.62, 1.62e-3));
    REQUIRE_THAT(j.at("values").at("ndot_per_ms").get<double>(),
                 WithinAbs(0.44, 4.4e-4));
  }
  SECTION("CSV data path works too") {
    REQUIRE(cmd_fit(outdir + "/detuningscan_99.csv",
                    CATSIM_CONFIG_DIR "/fig3a_fit.json", outdir, out,
                    err) == 0);
  }
  SECTION("malformed CSV exits 1") {
    const std::string bad = write_temp("catsim_bad_fit.csv", "not,a,scan\n");
    REQUIRE(cmd_fit(bad, CATSIM_CONFIG_DIR "/fig3a_fit.json", outdir, out,
                    err) == 1);
  }
  SECTION("all-fixed spec reports residuals only") {
    const std::string allfixed = write_temp("catsim_allfixed.json", R"(
{"model": "detuningscan",
 "fixed": {"omega_sb_khz": 1.62, "tau_us": 500, "nbar": 0.05,
           "ndot_per_ms": 0.44}}
)");
    REQUIRE(cmd_fit(outdir + "/detuningscan_99.json", allfixed, outdir, out,
                    err) == 0);
    nlohmann::json j = nlohmann::json::parse(
        read_file(outdir + "/fitresult_detuningscan.json"));
    REQUIRE(j.at("iterations").get<int>() == 0);
    REQUIRE(j.at("residual_norm").get<double>() < 1e-9);
  }
}

TEST_CASE("fit spec validation") {
  SECTION("unknown top-level key") {
    const std::string path = write_temp(
        "catsim_spec1.json", R"({"model": "timescan", "extra": 1})");
    REQUIRE_THROWS_AS(load_fit_spec(path), ConfigError);
  }
  SECTION("free parameter needs an init") {
    const std::string path = write_temp(
        "catsim_spec2.json",
        R"({"model": "timescan", "fixed": {"omega_sb_khz": 2.2},
            "free": {"delta_khz": {"min": 1}}})");
    REQUIRE_THROWS_AS(load_fit_spec(path), ConfigError);
  }
  SECTION("unknown free-parameter option") {
    const std::string path = write_temp(
        "catsim_spec3.json",
        R"({"model": "timescan", "fixed": {"omega_sb_khz": 2.2},
            "free": {"delta_khz": {"init": 5, "step": 1}}})");
    REQUIRE_THROWS_AS(load_fit_spec(path), ConfigError);
  }
}
