#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "gcsr/io.hpp"

// End-to-end checks against the installed binary. GCSR_CLI_PATH is injected
// by CMake.

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string out_path =
      std::string(GCSR_TEST_TMPDIR) + "/cli_stdout.txt";
  const std::string cmd =
      std::string(GCSR_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(status);
  std::ifstream in(out_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string tmp_file(const char* name) {
  return std::string(GCSR_TEST_TMPDIR) + "/" + name;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("model random is deterministic per seed and rejects bad flags") {
  const std::string m1 = tmp_file("m1.json");
  const std::string m2 = tmp_file("m2.json");
  const std::string base =
      "model random --nx 1 --ny 2 -p 2 --rho 0.8 --gamma 0.5 --null --seed 7 ";
  CHECK(run_cli(base + "--out " + m1).exit_code == 0);
  CHECK(run_cli(base + "--out " + m2).exit_code == 0);
  CHECK(gcsr::read_file(m1) == gcsr::read_file(m2));

  CHECK(run_cli("model random --nx 1 --ny 1 -p 1 --rho 0.5 --gamma 0 --null "
                "--bogus-flag")
            .exit_code == 1);
  // Missing required flag.
  CHECK(run_cli("model random --nx 1").exit_code == 1);
}

TEST_CASE("model info reports the generated family parameters") {
  const std::string m = tmp_file("info.json");
  REQUIRE(run_cli("model random --nx 1 --ny 2 -p 2 --rho 0.8 --gamma 0.5 "
                  "--null --seed 3 --out " + m)
              .exit_code == 0);
  const RunResult info = run_cli("model info " + m);
  CHECK(info.exit_code == 0);
  CHECK(info.output.find("\"spectral_radius\": 0.8") != std::string::npos);
  CHECK(info.output.find("\"is_null\": true") != std::string::npos);
  CHECK(info.output.find("\"gc_time_sr\": 0.0") != std::string::npos);
  CHECK(info.output.find("null_law") != std::string::npos);
}

TEST_CASE("unachievable targets exit with code 2") {
  CHECK(run_cli("model random --nx 1 --ny 1 -p 1 --rho 0.5 --gamma 50 --null")
            .exit_code == 2);
}

TEST_CASE("simulate emits N rows of n columns, deterministically") {
  const std::string m = tmp_file("sim_model.json");
  REQUIRE(run_cli("model random --nx 1 --ny 1 -p 1 --rho 0.6 --gamma 0.3 "
                  "--null --seed 5 --out " + m)
              .exit_code == 0);
  const std::string d1 = tmp_file("d1.csv");
  const std::string d2 = tmp_file("d2.csv");
  CHECK(run_cli("simulate " + m + " -N 200 --seed 11 --out " + d1).exit_code == 0);
  CHECK(run_cli("simulate " + m + " -N 200 --seed 11 --out " + d2).exit_code == 0);
  const std::string csv = gcsr::read_file(d1);
  CHECK(csv == gcsr::read_file(d2));
  int rows = 0;
  for (char c : csv)
    if (c == '\n') ++rows;
  CHECK(rows == 200);
  CHECK(csv.substr(0, csv.find('\n')).find(',') != std::string::npos);
}

TEST_CASE("gc: null model reports zero; full band matches the time value") {
  const std::string m = tmp_file("gc_model.json");
  REQUIRE(run_cli("model random --nx 1 --ny 2 -p 2 --rho 0.7 --gamma 0.5 "
                  "--null --seed 9 --out " + m)
              .exit_code == 0);
  const RunResult null_gc = run_cli("gc " + m);
  CHECK(null_gc.exit_code == 0);
  CHECK(std::strtod(null_gc.output.c_str(), nullptr) == 0.0);

  const std::string mg = tmp_file("gc_model2.json");
  REQUIRE(run_cli("model random --nx 1 --ny 2 -p 2 --rho 0.7 --gamma 0.5 "
                  "--gc 0.02 --seed 9 --out " + mg)
              .exit_code == 0);
  const double time_gc =
      std::strtod(run_cli("gc " + mg).output.c_str(), nullptr);
  CHECK(time_gc == doctest::Approx(0.02).epsilon(1e-5));
  const double band_gc = std::strtod(
      run_cli("gc " + mg + " --band 0 6.283185307179586").output.c_str(),
      nullptr);
  CHECK(band_gc == doctest::Approx(time_gc).epsilon(1e-6));
}

TEST_CASE("gc: spectrum rows integrate back to the time value") {
  const std::string mg = tmp_file("spec_model.json");
  REQUIRE(run_cli("model random --nx 1 --ny 1 -p 1 --rho 0.6 --gamma 0.4 "
                  "--gc 0.05 --seed 13 --out " + mg)
              .exit_code == 0);
  const RunResult spec =
      run_cli("gc " + mg + " --spectrum 512 --format csv");
  CHECK(spec.exit_code == 0);
  double acc = 0.0;
  int rows = 0;
  std::istringstream in(spec.output);
  std::string line;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    acc += std::strtod(line.substr(comma + 1).c_str(), nullptr);
    ++rows;
  }
  CHECK(rows == 512);
  const double time_gc =
      std::strtod(run_cli("gc " + mg).output.c_str(), nullptr);
  CHECK(acc / rows == doctest::Approx(time_gc).epsilon(1e-4));
}

TEST_CASE("nulldist reports p*ny weights and chi-square quantiles for white noise") {
  // Hand-written white-noise model file.
  const std::string m = tmp_file("white.json");
  gcsr::write_file(m, R"({
    "n": 2, "p": 1, "A": [[0.0, 0.0], [0.0, 0.0]],
    "Sigma": [[1.0, 0.0], [0.0, 1.0]],
    "partition": {"nx": 1, "ny": 1}
  })");
  const RunResult res = run_cli("nulldist " + m);
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("\"multiplicity\": 1") != std::string::npos);
  // chi^2(1) 0.95 quantile.
  CHECK(res.output.find("3.84145") != std::string::npos);

  const RunResult band = run_cli("nulldist " + m + " --band 0 3.14159");
  CHECK(band.exit_code == 0);
  CHECK(band.output.find("\"kind\": \"band\"") != std::string::npos);
}

TEST_CASE("test subcommand emits a consistent TestResult") {
  const std::string m = tmp_file("test_model.json");
  REQUIRE(run_cli("model random --nx 1 --ny 1 -p 1 --rho 0.6 --gamma 0.3 "
                  "--null --seed 21 --out " + m)
              .exit_code == 0);
  const std::string d = tmp_file("test_data.csv");
  REQUIRE(run_cli("simulate " + m + " -N 2048 --seed 22 --out " + d).exit_code ==
          0);
  for (const char* method : {"projection", "lr"}) {
    const RunResult res = run_cli("test " + d + " --partition 1 --alpha 0.05 "
                                  "--order 1 --method " + std::string(method));
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("\"p_value\"") != std::string::npos);
    CHECK(res.output.find("\"reject\"") != std::string::npos);
    CHECK(res.output.find("\"critical\"") != std::string::npos);
  }
  // Unreadable data file is an input error.
  CHECK(run_cli("test /nonexistent.csv --partition 1 --order 1").exit_code == 1);
}

TEST_CASE("experiment: identical bytes for any worker count") {
  const std::string cfg = tmp_file("exp.json");
  gcsr::write_file(cfg, R"({
    "type": "family", "nx": 1, "ny": 1, "p": 1, "rho": 0.6, "gamma": 0.3,
    "N_list": [256], "models": 3, "trials_per_model": 8,
    "alpha": 0.05, "tests": ["projection"],
    "order": {"policy": "fixed", "p": 1}
  })");
  const std::string o1 = tmp_file("rep1");
  const std::string o2 = tmp_file("rep2");
  CHECK(run_cli("experiment " + cfg + " --seed 5 --workers 1 --out " + o1)
            .exit_code == 0);
  CHECK(run_cli("experiment " + cfg + " --seed 5 --workers 8 --out " + o2)
            .exit_code == 0);
  CHECK(gcsr::read_file(o1 + ".json") == gcsr::read_file(o2 + ".json"));
  CHECK(gcsr::read_file(o1 + "_cells.csv") == gcsr::read_file(o2 + "_cells.csv"));
  CHECK(gcsr::read_file(o1 + "_summary.csv") ==
        gcsr::read_file(o2 + "_summary.csv"));
}

TEST_CASE("gc: --fs converts band limits from Hz") {
  const std::string mg = tmp_file("hz_model.json");
  REQUIRE(run_cli("model random --nx 1 --ny 1 -p 1 --rho 0.6 --gamma 0.4 "
                  "--gc 0.05 --seed 15 --out " + mg)
              .exit_code == 0);
  // Band [0.5, 2.0] rad equals [0.5, 2.0] * fs / (2 pi) Hz.
  const double rad = std::strtod(
      run_cli("gc " + mg + " --band 0.5 2.0").output.c_str(), nullptr);
  const double fs = 250.0;
  const double lo_hz = 0.5 * fs / 6.283185307179586;
  const double hi_hz = 2.0 * fs / 6.283185307179586;
  char cmd[256];
  std::snprintf(cmd, sizeof(cmd), "gc %s --fs 250 --band %.17g %.17g",
                mg.c_str(), lo_hz, hi_hz);
  const double hz = std::strtod(run_cli(cmd).output.c_str(), nullptr);
  CHECK(hz == doctest::Approx(rad).epsilon(1e-12));
}

TEST_CASE("oracle agrees with itself across the pipeline") {
  const RunResult res = run_cli(
      "oracle --axx 0.4 --axy 0 --ayx 0.2 --ayy 0.5 --sxy 0.3 --band 0 1.5");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("null_lambda") != std::string::npos);
  CHECK(res.output.find("closed_form") != std::string::npos);
}

}  // TEST_SUITE
