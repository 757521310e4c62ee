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

// Experiment orchestration behind the nmcollide command line: JSON config
// parsing, the run / sweep / certify drivers, and CSV + manifest output.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmcollide/collision_engine.hpp"
#include "nmcollide/errors.hpp"
#include "nmcollide/continuous_maps.hpp"
#include "nmcollide/jc_analytic.hpp"
#include "nmcollide/tolerance.hpp"
#include "nmcollide/verify.hpp"

namespace nmc {

inline constexpr const char* kVersion = "1.0.0";

/// Fixed CSV header shared by every mode; absent columns stay empty.
inline constexpr const char* kCsvHeader = "tau,gamma_bar,beta1,beta2,trace_distance_vs_discrete,min_choi_eig";

enum class Mode { discrete, series, jc_closed_form, thermal, convergence, certify };

/// Config problem with the offending field path, e.g. "physics.gamma_bar".
class FieldError : public ConfigError {
 public:
  FieldError(std::string field, const std::string& message)
      : ConfigError(message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct Range {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  /// count evenly spaced values; count == 1 gives {start}.
  std::vector<double> values() const;
};

struct Coupling {
  bool is_jc = true;
  double omega = 1.0;  // rate that defines tau = omega t
  int system_dim = 2;
  int ancilla_dim = 2;
  HermitianOperator hamiltonian = jc_coupling(1.0);
};

struct ExperimentConfig {
  Mode mode = Mode::jc_closed_form;
  std::string output_path = "nmcollide-output";
  std::uint64_t seed = 0;

  Coupling coupling;
  BathSpec bath = BathSpec::pure_ground();
  std::optional<QubitStateParams> initial_qubit;  // unset with random_initial_state or basis_state
  bool random_initial_state = false;
  int basis_state = -1;

  std::optional<double> gamma_bar;
  std::optional<double> p_s;
  std::vector<double> gamma_bars;  // certify sweep; defaults to {gamma_bar}
  TimeGrid grid;                   // in rescaled time tau
  bool has_grid = false;           // sweep-only configs may leave it out
  double omega_t_c = 0.1;          // discrete collision time in units of 1/omega
  std::vector<double> t_c_list;    // convergence mode, units of 1/omega
  SeriesPolicy series;
  CptTolerance cpt;

  std::optional<Range> sweep_gamma_bar;
  std::optional<Range> sweep_tau;

  ToleranceProfile tolerances;
  nlohmann::json source;  // config as read, echoed into the manifest
};

ExperimentConfig parse_config(const nlohmann::json& doc);
/// Reads and parses a config file; whitespace-only files parse as {}.
ExperimentConfig load_config(const std::filesystem::path& path);

std::string mode_name(Mode mode);

/// "%.17g"; empty optionals give an empty field.
std::string csv_number(std::optional<double> value);

struct CsvRow {
  double tau = 0.0;
  std::optional<double> gamma_bar;
  std::optional<double> beta1;
  std::optional<double> beta2;
  std::optional<double> trace_distance;
  std::optional<double> min_choi;
};

std::string format_csv(const std::vector<CsvRow>& rows);

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitCertification = 3, kExitNumerical = 4 };

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> outputs;
  nlohmann::json manifest;
  std::optional<nlohmann::json> error;  // machine-readable error object
};

/// `nmcollide run`: the config's mode decides what is computed.
RunResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& output_dir);
/// `nmcollide sweep`: closed-form beta rows over the gamma_bar x tau ranges.
RunResult run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& output_dir);
/// `nmcollide certify`: CPT certification of the maps the config produces.
RunResult run_certify(const ExperimentConfig& cfg, const std::filesystem::path& output_dir);

/// Full command driver shared by the binary and the tests: loads the config,
/// dispatches, converts exceptions into exit codes plus an error object.
RunResult execute_command(const std::string& command, const std::filesystem::path& config_path,
                          const std::optional<std::filesystem::path>& output_dir_override);

}  // namespace nmc
