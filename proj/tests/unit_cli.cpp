#include "evo/commands.hpp"
#include "evo/config.hpp"
#include "evo/csv.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace evo;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "evo_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream is(path);
    REQUIRE(is.good());
    std::stringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

std::string scalar_config(const std::string& output_dir, const std::string& extra = "") {
    return R"({
      "schema_version": 1,
      "problem": {
        "M0": {"type": "constant", "matrix": [[1.0]]},
        "M1": {"type": "constant", "matrix": [[1.0]]},
        "forcing": {"type": "step"}
      },
      "grid": {"t_min": 0.0, "t_max": 2.0, "n": 64},
      "weight": {"rho": 1.0},
      "output_dir": ")" +
           output_dir + "\"" + extra + "\n}";
}

}  // namespace

TEST_CASE("parse_config reads the scalar schema") {
    const RunConfig cfg = parse_config(scalar_config("/tmp"));
    CHECK(cfg.schema_version == 1);
    CHECK(cfg.M0.dim == 1);
    CHECK(cfg.M1.at(0.0)(0, 0) == 1.0);
    CHECK(cfg.grid.n == 64);
    CHECK(cfg.rho_values == std::vector<double>{1.0});
    CHECK(cfg.forcing_type == "step");
    CHECK(cfg.dim() == 1);
    CHECK(cfg.forcing().col(10)(0) == 1.0);
    CHECK(cfg.perturbation_type == "none");
    CHECK(cfg.seed == 0);
}

TEST_CASE("parse_config covers every family type") {
    const fs::path dir = scratch_dir("families");
    {
        std::ofstream table(dir / "table.csv");
        table << "0.0,1.0,0.0,0.0,1.0\n1.0,2.0,0.0,0.0,2.0\n";
    }
    const std::string text = R"({
      "schema_version": 1,
      "problem": {
        "M0": {"type": "ramp", "scale": [[1.0]], "offset": [[0.5]]},
        "M1": {"type": "piecewise", "breakpoints": [0.5],
               "matrices": [[[1.0]], [[3.0]]]}
      },
      "grid": {"t_min": 0.0, "t_max": 1.0, "n": 8},
      "weight": {"sweep": [1.0, 2.0]}
    })";
    const RunConfig cfg = parse_config(text);
    CHECK(cfg.M0.at(-1.0)(0, 0) == doctest::Approx(0.5));
    CHECK(cfg.M0.at(0.25)(0, 0) == doctest::Approx(0.75));
    CHECK(cfg.M0.at(2.0)(0, 0) == doctest::Approx(1.5));
    CHECK(cfg.M1.at(0.25)(0, 0) == 1.0);
    CHECK(cfg.M1.at(0.75)(0, 0) == 3.0);
    CHECK(cfg.M1.piecewise_constant);
    CHECK(cfg.rho_values.size() == 2);

    const std::string table_cfg = R"({
      "schema_version": 1,
      "problem": {
        "M0": {"type": "table", "csv": ")" +
                                  (dir / "table.csv").string() + R"("},
        "M1": {"type": "constant", "matrix": [[1.0, 0.0], [0.0, 1.0]]}
      },
      "grid": {"t_min": 0.0, "t_max": 1.0, "n": 8},
      "weight": {"rho": 1.0}
    })";
    const RunConfig tab = parse_config(table_cfg);
    CHECK(tab.M0.dim == 2);
    CHECK(tab.M0.at(0.5)(0, 0) == doctest::Approx(1.5));  // linear interpolation
    CHECK(tab.M0.at(5.0)(1, 1) == doctest::Approx(2.0));  // clamped past the table
    CHECK(tab.M0.breakpoints == std::vector<double>{0.0, 1.0});
}

TEST_CASE("parse_config rejects malformed input with a location hint") {
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"schema_version": 7})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"grid": {}})"), ConfigError);  // missing version

    const std::string bad_family = R"({
      "schema_version": 1,
      "problem": {"M0": {"type": "mystery"}, "M1": {"type": "constant", "matrix": [[1]]}},
      "grid": {"t_min": 0, "t_max": 1, "n": 8},
      "weight": {"rho": 1.0}
    })";
    try {
        parse_config(bad_family);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("problem.M0") != std::string::npos);
    }

    const std::string ragged = R"({
      "schema_version": 1,
      "problem": {"M0": {"type": "constant", "matrix": [[1, 0], [1]]},
                  "M1": {"type": "constant", "matrix": [[1, 0], [0, 1]]}},
      "grid": {"t_min": 0, "t_max": 1, "n": 8},
      "weight": {"rho": 1.0}
    })";
    CHECK_THROWS_AS(parse_config(ragged), ConfigError);

    const std::string bad_rho = R"({
      "schema_version": 1,
      "problem": {"M0": {"type": "constant", "matrix": [[1]]},
                  "M1": {"type": "constant", "matrix": [[1]]}},
      "grid": {"t_min": 0, "t_max": 1, "n": 8},
      "weight": {"rho": -2.0}
    })";
    CHECK_THROWS_AS(parse_config(bad_rho), ConfigError);

    const std::string missing_kernel = R"({
      "schema_version": 1,
      "problem": {"M0": {"type": "constant", "matrix": [[1]]},
                  "M1": {"type": "constant", "matrix": [[1]]}},
      "grid": {"t_min": 0, "t_max": 1, "n": 8},
      "weight": {"rho": 1.0},
      "perturbation": {"type": "convolution", "kernel_csv": "/nonexistent/k.csv"}
    })";
    try {
        parse_config(missing_kernel);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("missing file") != std::string::npos);
    }

    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("cmd_check reports the certificate and the range minima") {
    const fs::path dir = scratch_dir("check");
    const std::string text = R"({
      "schema_version": 1,
      "example": {"type": "mixed-type", "m": 16, "epsilon": 0.25, "nonautonomous": true},
      "grid": {"t_min": -1.0, "t_max": 3.0, "n": 64},
      "weight": {"rho": 1.0},
      "output_dir": ")" + dir.string() + R"("
    })";
    const RunConfig cfg = parse_config(text);
    std::ostringstream os;
    CHECK(cmd_check(cfg, os) == kOk);
    CHECK(os.str().find("certificate: rho0=") != std::string::npos);
    CHECK(os.str().find("range minima:") != std::string::npos);
    CHECK(slurp(dir / "check_summary.txt").find("ok=1") != std::string::npos);
}

TEST_CASE("cmd_check flags a negative M0 with the certificate exit code") {
    const fs::path dir = scratch_dir("check_neg");
    const std::string text = R"({
      "schema_version": 1,
      "problem": {"M0": {"type": "constant", "matrix": [[-1.0]]},
                  "M1": {"type": "constant", "matrix": [[1.0]]}},
      "grid": {"t_min": 0.0, "t_max": 1.0, "n": 16},
      "weight": {"rho": 1.0},
      "output_dir": ")" + dir.string() + R"("
    })";
    std::ostringstream os;
    CHECK(cmd_check(parse_config(text), os) == kCertificateError);
    CHECK(os.str().find("nonnegativity") != std::string::npos);
}

TEST_CASE("cmd_solve writes artifacts and is deterministic") {
    const fs::path dir1 = scratch_dir("solve1");
    const fs::path dir2 = scratch_dir("solve2");
    std::ostringstream os;
    CHECK(cmd_solve(parse_config(scalar_config(dir1.string())), os) == kOk);
    CHECK(cmd_solve(parse_config(scalar_config(dir2.string())), os) == kOk);
    CHECK(fs::exists(dir1 / "solution.csv"));
    CHECK(fs::exists(dir1 / "report.txt"));
    CHECK(fs::exists(dir1 / "solve_summary.txt"));
    CHECK(slurp(dir1 / "solution.csv") == slurp(dir2 / "solution.csv"));
    CHECK(slurp(dir1 / "report.txt") == slurp(dir2 / "report.txt"));

    // Plot data on demand only.
    CHECK(!fs::exists(dir1 / "plot_data.csv"));
    CommandOptions opt;
    opt.emit_plot_data = true;
    CHECK(cmd_solve(parse_config(scalar_config(dir1.string())), os, opt) == kOk);
    CHECK(fs::exists(dir1 / "plot_data.csv"));
}

TEST_CASE("cmd_solve logs the delay iteration") {
    const fs::path dir = scratch_dir("solve_delay");
    const std::string extra = R"(,
      "perturbation": {"type": "delay", "tau": 0.25})";
    std::ostringstream os;
    CHECK(cmd_solve(parse_config(scalar_config(dir.string(), extra)), os) == kOk);
    CHECK(fs::exists(dir / "iterations.csv"));
    CHECK(os.str().find("iteration: iters=") != std::string::npos);

    // Last logged ratio is a genuine contraction.
    const std::string log = slurp(dir / "iterations.csv");
    const size_t last_comma = log.find_last_of(',');
    REQUIRE(last_comma != std::string::npos);
    const double last_ratio = std::stod(log.substr(last_comma + 1));
    CHECK(last_ratio < 1.0);
}

TEST_CASE("cmd_verify passes every check on the mixed-type example") {
    const fs::path dir = scratch_dir("verify");
    const std::string text = R"({
      "schema_version": 1,
      "example": {"type": "mixed-type", "m": 16, "epsilon": 0.25},
      "grid": {"t_min": -1.0, "t_max": 3.0, "n": 32},
      "weight": {"rho": 1.0},
      "forcing": {"type": "step"},
      "verification": ["causality", "norm_bound", "energy", "adjoint", "oracle"],
      "seed": 7,
      "output_dir": ")" + dir.string() + R"("
    })";
    std::ostringstream os;
    CHECK(cmd_verify(parse_config(text), os) == kOk);
    const std::string report = os.str();
    CHECK(report.find("PASS causality") != std::string::npos);
    CHECK(report.find("PASS norm_bound") != std::string::npos);
    CHECK(report.find("PASS energy") != std::string::npos);
    CHECK(report.find("PASS adjoint") != std::string::npos);
    CHECK(report.find("PASS oracle") != std::string::npos);
    CHECK(report.find("FAIL") == std::string::npos);
    CHECK(slurp(dir / "verify_summary.txt").find("causality=1") != std::string::npos);
}

TEST_CASE("cmd_verify: empty list is ok, unknown check is a config error") {
    const fs::path dir = scratch_dir("verify_edge");
    std::ostringstream os;
    CHECK(cmd_verify(parse_config(scalar_config(dir.string())), os) == kOk);
    const std::string extra = R"(,
      "verification": ["telepathy"])";
    CHECK(cmd_verify(parse_config(scalar_config(dir.string(), extra)), os) == kConfigError);
}

TEST_CASE("cmd_sweep_rho reports decreasing delay contraction") {
    const fs::path dir = scratch_dir("sweep");
    const std::string text = R"({
      "schema_version": 1,
      "problem": {"M0": {"type": "constant", "matrix": [[0.0]]},
                  "M1": {"type": "constant", "matrix": [[1.0]]},
                  "forcing": {"type": "step"}},
      "grid": {"t_min": 0.0, "t_max": 2.0, "n": 128},
      "weight": {"sweep": [1.0, 2.0, 4.0]},
      "perturbation": {"type": "delay", "tau": 0.5},
      "output_dir": ")" + dir.string() + R"("
    })";
    std::ostringstream os;
    CHECK(cmd_sweep_rho(parse_config(text), os) == kOk);
    CHECK(fs::exists(dir / "sweep.csv"));
    CHECK(os.str().find("contraction_ratio non-increasing: yes") != std::string::npos);

    const std::string single = scalar_config(dir.string());
    CHECK(cmd_sweep_rho(parse_config(single), os) == kConfigError);
}
