// Copyright 2026 The nmcollide Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Config parsing, CSV format and the nmcollide binary end to end.

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

#include "nmcollide/experiment.hpp"

using namespace nmc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nmcollide-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int exit_code;
  std::string stderr_text;
};

CliResult cli(const std::string& args, const fs::path& dir, const std::string& env = "") {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = env + " " + NMCOLLIDE_CLI_PATH + " " + args + " >/dev/null 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(fields);
  }
  return rows;
}

std::string field_of(const ConfigError& e) {
  if (auto f = dynamic_cast<const FieldError*>(&e)) return f->field();
  return "";
}

std::string parse_error_field(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return field_of(e);
  }
  return "<none>";
}

}  // namespace

TEST_CASE("config errors name the field") {
  CHECK(parse_error_field(json::object()) == "mode");
  CHECK(parse_error_field({{"mode", "bogus"}}) == "mode");
  CHECK(parse_error_field({{"mode", "jc_closed_form"}}) == "grid.tau_max");
  CHECK(parse_error_field({{"mode", "jc_closed_form"}, {"grid", {{"tau_max", 1.0}}}}) == "grid.n_points");
  CHECK(parse_error_field({{"mode", "discrete"}, {"grid", {{"tau_max", 1.0}}}, {"typo", 1}}) == "typo");
  CHECK(parse_error_field({{"mode", "discrete"},
                           {"grid", {{"tau_max", 1.0}}},
                           {"physics", {{"gamma_bar", 1.0}, {"p_s", 0.5}}}}) == "physics.p_s");
  CHECK(parse_error_field({{"mode", "discrete"}, {"grid", {{"tau_max", 1.0}}}, {"physics", {{"gamma_bar", "x"}}}}) ==
        "physics.gamma_bar");
  CHECK(parse_error_field({{"mode", "discrete"},
                           {"grid", {{"tau_max", 1.0}}},
                           {"physics", {{"bath", {{"kind", "thermal"}, {"energies", {0, 1}}}}}}}) ==
        "physics.bath.beta");
  CHECK(parse_error_field({{"mode", "series"},
                           {"grid", {{"tau_max", 1.0}, {"dtau", 0.1}}},
                           {"physics", {{"coupling", {{"type", "matrix"}, {"system_dim", 2}, {"ancilla_dim", 2}}}}}}) ==
        "physics.coupling.real");
  CHECK(parse_error_field({{"mode", "discrete"},
                           {"grid", {{"tau_max", 1.0}}},
                           {"tolerances", {{"positivity", -1.0}}}}) == "tolerances.positivity");
}

TEST_CASE("config parsing fills the physics") {
  const ExperimentConfig cfg = parse_config(json::parse(R"({
    "mode": "thermal", "seed": 9, "output_path": "x",
    "physics": {"gamma_bar": 1.5, "omega_t_c": 0.05,
                "bath": {"kind": "thermal", "energies": [0, 1], "beta": 2.0},
                "initial_state": {"p": 0.5, "r": [0.1, 0.2]},
                "coupling": {"type": "jc", "omega": 2.0}},
    "grid": {"tau_max": 1.0},
    "series": {"k_max": 50, "tail_tol": 1e-9},
    "tolerances": {"positivity": 1e-9}
  })"));
  CHECK(cfg.mode == Mode::thermal);
  CHECK(cfg.seed == 9);
  CHECK(*cfg.gamma_bar == 1.5);
  CHECK(cfg.omega_t_c == 0.05);
  CHECK(cfg.bath.kind() == BathKind::thermal);
  CHECK(cfg.coupling.omega == 2.0);
  CHECK(cfg.initial_qubit->p == 0.5);
  CHECK(cfg.series.k_max == 50);
  CHECK(cfg.tolerances.positivity == 1e-9);
}

TEST_CASE("csv formatting") {
  CHECK(csv_number(std::nullopt).empty());
  CHECK(csv_number(0.1) == "0.10000000000000001");
  CHECK(csv_number(1.0) == "1");
  const std::string text = format_csv({{0.5, 1.0, std::nullopt, 0.25, std::nullopt, -1e-17}});
  CHECK(text == "tau,gamma_bar,beta1,beta2,trace_distance_vs_discrete,min_choi_eig\n0.5,1,,0.25,,-1.0000000000000001e-17\n");
}

TEST_CASE("range values") {
  CHECK((Range{0.0, 1.0, 3}.values()) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK((Range{2.0, 2.0, 1}.values()) == std::vector<double>{2.0});
}

TEST_CASE("empty config file exits 2 naming the missing field") {
  const fs::path dir = scratch("empty");
  const fs::path cfg = write_config(dir, "");
  const CliResult r = cli("run " + cfg.string() + " --output-dir " + (dir / "out").string(), dir);
  CHECK(r.exit_code == 2);
  const json err = json::parse(r.stderr_text);
  CHECK(err["error"]["field"] == "mode");
  CHECK(err["error"]["exit_code"] == 2);
  CHECK(fs::exists(dir / "out" / "error.json"));
}

TEST_CASE("unparseable config exits 2") {
  const fs::path dir = scratch("garbage");
  const fs::path cfg = write_config(dir, "{ not json");
  CHECK(cli("run " + cfg.string(), dir).exit_code == 2);
  CHECK(cli("run " + (dir / "missing.json").string(), dir).exit_code == 2);
  CHECK(cli("frobnicate " + cfg.string(), dir).exit_code == 2);
}

TEST_CASE("jc_closed_form at Gamma = 0 writes cos tau, then certifies") {
  const fs::path dir = scratch("jc");
  const fs::path cfg = write_config(dir, R"({"mode": "jc_closed_form", "output_path": ")" +
                                             (dir / "run").string() + R"(",
    "physics": {"gamma_bar": 0.0}, "grid": {"tau_max": 6.283185307179586, "n_points": 629}})");
  REQUIRE(cli("run " + cfg.string(), dir).exit_code == 0);
  const auto rows = read_csv(dir / "run" / "results.csv");
  REQUIRE(rows.size() == 630);
  CHECK(rows[0].size() == 6);
  double worst = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 6);
    const double tau = std::stod(rows[i][0]);
    worst = std::max(worst, std::abs(std::stod(rows[i][2]) - std::cos(tau)));
    CHECK(rows[i][4].empty());
  }
  CHECK(worst <= 1e-12);
  CHECK(std::abs(std::stod(rows.back()[0]) - 2 * std::numbers::pi) < 1e-15);

  const json manifest = json::parse(slurp(dir / "run" / "manifest.json"));
  CHECK(manifest["config"]["mode"] == "jc_closed_form");
  CHECK(manifest.contains("timings"));
  CHECK(manifest["version"] == kVersion);

  REQUIRE(cli("certify " + cfg.string() + " --output-dir " + (dir / "cert").string(), dir).exit_code == 0);
  const json report = json::parse(slurp(dir / "cert" / "certify.json"));
  CHECK(report["verdict"] == true);
}

TEST_CASE("sweep rows are ordered and byte-identical across reruns and thread caps") {
  const fs::path dir = scratch("sweep");
  const fs::path cfg = write_config(dir, R"({"mode": "jc_closed_form", "seed": 4,
    "sweep": {"gamma_bar": {"start": 0.5, "stop": 1.5, "count": 2}, "tau": {"start": 0.0, "stop": 1.0, "count": 2}}})");
  REQUIRE(cli("sweep " + cfg.string() + " --output-dir " + (dir / "a").string(), dir).exit_code == 0);
  REQUIRE(cli("sweep " + cfg.string() + " --output-dir " + (dir / "b").string(), dir).exit_code == 0);
  REQUIRE(cli("sweep " + cfg.string() + " --output-dir " + (dir / "c").string(), dir, "NMCOLLIDE_THREADS=1")
              .exit_code == 0);
  const std::string a = slurp(dir / "a" / "sweep.csv");
  CHECK(a == slurp(dir / "b" / "sweep.csv"));
  CHECK(a == slurp(dir / "c" / "sweep.csv"));
  const auto rows = read_csv(dir / "a" / "sweep.csv");
  REQUIRE(rows.size() == 5);
  CHECK(rows[1][1] == "0.5");
  CHECK(rows[2][1] == "0.5");
  CHECK(rows[3][1] == "1.5");
  CHECK(rows[1][0] == "0");
  CHECK(rows[2][0] == "1");
}

TEST_CASE("discrete run is deterministic and compares to the closed form") {
  const fs::path dir = scratch("discrete");
  const fs::path cfg = write_config(dir, R"({"mode": "discrete", "seed": 17,
    "physics": {"gamma_bar": 1.0, "omega_t_c": 0.05, "initial_state": "random"}, "grid": {"tau_max": 2.0}})");
  REQUIRE(cli("run " + cfg.string() + " --output-dir " + (dir / "a").string(), dir).exit_code == 0);
  REQUIRE(cli("run " + cfg.string() + " --output-dir " + (dir / "b").string(), dir).exit_code == 0);
  CHECK(slurp(dir / "a" / "results.csv") == slurp(dir / "b" / "results.csv"));
  const auto rows = read_csv(dir / "a" / "results.csv");
  REQUIRE(rows.size() == 42);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(!rows[i][4].empty());
    CHECK(std::stod(rows[i][4]) < 1e-3);
  }
}

TEST_CASE("series truncation exits 4") {
  const fs::path dir = scratch("trunc");
  const fs::path cfg = write_config(dir, R"({"mode": "series", "physics": {"gamma_bar": 2.0},
    "grid": {"tau_max": 2.0, "dtau": 0.01}, "series": {"k_max": 3}})");
  const CliResult r = cli("run " + cfg.string() + " --output-dir " + (dir / "o").string(), dir);
  CHECK(r.exit_code == 4);
  CHECK(json::parse(r.stderr_text)["error"]["kind"] == "truncation");
}

TEST_CASE("certification failure exits 3") {
  // Quadrature maps are TP only to O(dt^2); a zero trace tolerance must fail.
  const fs::path dir = scratch("certfail");
  const fs::path cfg = write_config(dir, R"({"mode": "series", "physics": {"gamma_bar": 1.0},
    "grid": {"tau_max": 1.0, "dtau": 0.05}, "certify": {"trace_tol": 0.0}})");
  const CliResult r = cli("certify " + cfg.string() + " --output-dir " + (dir / "o").string(), dir);
  CHECK(r.exit_code == 3);
  CHECK(json::parse(r.stderr_text)["error"]["kind"] == "certification");
  CHECK(json::parse(slurp(dir / "o" / "certify.json"))["verdict"] == false);
}

TEST_CASE("thermal and convergence modes run") {
  const fs::path dir = scratch("modes");
  const fs::path thermal = write_config(dir, R"({"mode": "thermal",
    "physics": {"gamma_bar": 1.0, "omega_t_c": 0.1, "bath": {"kind": "thermal", "energies": [0, 1], "beta": 0.5}},
    "grid": {"tau_max": 1.0}})");
  CHECK(cli("run " + thermal.string() + " --output-dir " + (dir / "t").string(), dir).exit_code == 0);

  const fs::path conv = dir / "conv.json";
  std::ofstream(conv) << R"({"mode": "convergence", "physics": {"gamma_bar": 1.0, "t_c_list": [0.1, 0.05]},
    "grid": {"tau_max": 1.0}})";
  REQUIRE(cli("run " + conv.string() + " --output-dir " + (dir / "c").string(), dir).exit_code == 0);
  const json report = json::parse(slurp(dir / "c" / "convergence.json"));
  CHECK(report["monotone"] == true);
}

TEST_CASE("in-process driver restores tolerances") {
  const fs::path dir = scratch("tol");
  const fs::path cfg = write_config(dir, R"({"mode": "jc_closed_form", "physics": {"gamma_bar": 1.0},
    "grid": {"tau_max": 1.0, "n_points": 3}, "tolerances": {"positivity": 0.5}})");
  const double before = tolerances().positivity;
  const RunResult r = execute_command("run", cfg, dir / "o");
  CHECK(r.exit_code == 0);
  CHECK(tolerances().positivity == before);
}
