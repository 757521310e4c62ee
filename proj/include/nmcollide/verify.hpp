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

// Independent oracles and certification reports.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "nmcollide/collision_engine.hpp"
#include "nmcollide/continuous_maps.hpp"
#include "nmcollide/jc_analytic.hpp"
#include "nmcollide/laplace.hpp"

namespace nmc {

/// Literal protocol on the full S (x) ancilla_1 (x) ... (x) ancilla_n state.
/// Exponential in n_steps; refuses n_steps > n_max or joint dims above 4096.
TrajectoryRecord brute_force_chain(const CollisionConfig& cfg, const DensityOperator& rho0, int n_max = 6);

/// Laplace transforms of beta_l, c_l(s + g) / (1 - g c_l(s + g)), l in {1, 2}.
LaplaceFunction beta_transform(int ell, double gamma_bar);

struct CptTolerance {
  double choi = 1e-9;
  double trace = 1e-10;
};

struct CptReport {
  TimeGrid grid;
  double gamma_bar = 0.0;
  std::vector<double> min_choi_eigenvalue;
  std::vector<double> max_trace_defect;
  CptTolerance tolerance;
  bool verdict = false;
};

/// One map per grid point. Non-Hermiticity-preserving maps count as failures.
CptReport certify_cpt(std::span<const Superoperator> maps, const TimeGrid& grid, double gamma_bar,
                      const CptTolerance& tolerance = {});

struct ConvergenceReport {
  double gamma_bar = 0.0;
  double tau_max = 0.0;
  std::vector<double> t_c_values;
  std::vector<double> errors;  // max_n trace distance along the trajectory
  std::optional<double> estimated_order;
};

/// Discrete JC runs with p_s = e^{-gamma_bar * Omega t_c} (Omega = 1) against
/// lambda_jc. t_c values must be strictly decreasing and divide tau_max.
ConvergenceReport convergence_study(double gamma_bar, double tau_max, const std::vector<double>& t_c_list,
                                    const QubitStateParams& rho0 = {0.5, Complex(0.3, 0.2)});

/// Least-squares slope of log(error) against log(t_c); empty for fewer than
/// two points or non-positive errors.
std::optional<double> log_log_slope(const std::vector<double>& t_c, const std::vector<double>& errors);

nlohmann::json to_json(const TimeGrid& grid);
nlohmann::json to_json(const CptReport& report);
nlohmann::json to_json(const ConvergenceReport& report);

}  // namespace nmc
