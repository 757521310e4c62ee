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

#include "nmcollide/verify.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nmcollide/errors.hpp"
#include "nmcollide/parallel.hpp"

namespace nmc {

TrajectoryRecord brute_force_chain(const CollisionConfig& cfg, const DensityOperator& rho0, int n_max) {
  if (cfg.n_steps > n_max) {
    std::ostringstream os;
    os << "brute_force_chain: n_steps " << cfg.n_steps << " exceeds n_max " << n_max;
    throw ConfigError(os.str());
  }
  if (!(cfg.t_c >= 0.0)) throw ConfigError("brute_force_chain: t_c must be >= 0");
  // t_c = 0 is meaningful here (nothing happens), but not to the validator.
  CollisionConfig checked = cfg;
  checked.t_c = 1.0;
  const CollisionUnit unit = make_collision_unit(checked);
  if (rho0.dim() != cfg.system_dim) throw ConfigError("brute_force_chain: initial state does not match system_dim");

  const int n = cfg.n_steps;
  std::vector<int> dims{cfg.system_dim};
  long long total = cfg.system_dim;
  for (int i = 0; i < n; ++i) {
    dims.push_back(unit.dim);
    total *= unit.dim;
    if (total > 4096) throw ConfigError("brute_force_chain: joint dimension above 4096");
  }

  Matrix state = rho0.matrix();
  for (int i = 0; i < n; ++i) state = kron(state, unit.initial_state);

  const Matrix u = unit.coupling.propagator(cfg.t_c);
  const KrausChannel swap = partial_swap_channel(unit.dim, cfg.p_s);
  const std::vector<int> keep_system{0};

  TrajectoryRecord record;
  record.states.push_back(rho0);
  record.times.push_back(0.0);
  for (int step = 1; step <= n; ++step) {
    if (step >= 2) {
      const std::vector<int> pair{step - 1, step};
      Matrix swapped = Matrix::Zero(state.rows(), state.cols());
      for (const auto& k : swap.operators()) swapped += conjugate_on_slots(state, k, dims, pair);
      state = std::move(swapped);
    }
    const std::vector<int> collision{0, step};
    state = conjugate_on_slots(state, u, dims, collision);
    record.states.emplace_back(partial_trace(state, dims, keep_system));
    record.times.push_back(step * cfg.t_c);
  }
  return record;
}

LaplaceFunction beta_transform(int ell, double gamma_bar) {
  if (ell != 1 && ell != 2) throw ConfigError("beta_transform: ell must be 1 or 2");
  const long double g = gamma_bar;
  if (ell == 1) {
    return [g](ComplexLD s) {
      const ComplexLD u = s + g;
      const ComplexLD c = u / (u * u + 1.0L);
      return c / (1.0L - g * c);
    };
  }
  return [g](ComplexLD s) {
    const ComplexLD u = s + g;
    const ComplexLD c = (u * u + 2.0L) / (u * (u * u + 4.0L));
    return c / (1.0L - g * c);
  };
}

CptReport certify_cpt(std::span<const Superoperator> maps, const TimeGrid& grid, double gamma_bar,
                      const CptTolerance& tolerance) {
  if (maps.empty()) throw ConfigError("certify_cpt: no maps");
  if (static_cast<int>(maps.size()) != grid.n_points)
    throw ConfigError("certify_cpt: one map per grid point required");

  CptReport report;
  report.grid = grid;
  report.gamma_bar = gamma_bar;
  report.tolerance = tolerance;
  report.min_choi_eigenvalue.assign(maps.size(), 0.0);
  report.max_trace_defect.assign(maps.size(), 0.0);

  parallel_for(static_cast<int>(maps.size()), [&](int j) {
    report.max_trace_defect[j] = maps[j].trace_defect();
    try {
      report.min_choi_eigenvalue[j] = maps[j].choi().min_eigenvalue();
    } catch (const InvariantError&) {
      report.min_choi_eigenvalue[j] = -std::numeric_limits<double>::infinity();
    }
  });

  report.verdict = true;
  for (std::size_t j = 0; j < maps.size(); ++j)
    if (!(report.min_choi_eigenvalue[j] >= -tolerance.choi) || !(report.max_trace_defect[j] <= tolerance.trace))
      report.verdict = false;
  return report;
}

std::optional<double> log_log_slope(const std::vector<double>& t_c, const std::vector<double>& errors) {
  if (t_c.size() != errors.size() || t_c.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(t_c.size());
  for (std::size_t i = 0; i < t_c.size(); ++i) {
    if (!(errors[i] > 0.0) || !(t_c[i] > 0.0)) return std::nullopt;
    const double x = std::log(t_c[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

ConvergenceReport convergence_study(double gamma_bar, double tau_max, const std::vector<double>& t_c_list,
                                    const QubitStateParams& rho0) {
  if (t_c_list.empty()) throw ConfigError("convergence_study: empty t_c list");
  if (!(tau_max > 0.0)) throw ConfigError("convergence_study: tau_max must be > 0");
  for (std::size_t i = 1; i < t_c_list.size(); ++i)
    if (!(t_c_list[i] < t_c_list[i - 1])) throw ConfigError("convergence_study: t_c values must strictly decrease");
  rho0.validate();

  ConvergenceReport report;
  report.gamma_bar = gamma_bar;
  report.tau_max = tau_max;
  report.t_c_values = t_c_list;
  report.errors.assign(t_c_list.size(), 0.0);
  const DensityOperator initial = rho0.density();

  parallel_for(static_cast<int>(t_c_list.size()), [&](int i) {
    const double t_c = t_c_list[i];
    const double steps = std::round(tau_max / t_c);
    if (steps < 1.0 || std::abs(steps * t_c - tau_max) > 1e-9 * tau_max)
      throw ConfigError("convergence_study: each t_c must divide tau_max");

    CollisionConfig cfg;
    cfg.hamiltonian = jc_coupling(1.0);
    cfg.t_c = t_c;
    cfg.p_s = std::exp(-gamma_bar * t_c);
    cfg.n_steps = static_cast<int>(steps);
    const TrajectoryRecord traj = run_discrete(cfg, initial);

    double worst = 0.0;
    for (std::size_t n = 0; n < traj.states.size(); ++n)
      worst = std::max(worst, trace_distance(traj.states[n], lambda_jc(traj.times[n], gamma_bar, rho0)));
    report.errors[i] = worst;
  });
  report.estimated_order = log_log_slope(report.t_c_values, report.errors);
  return report;
}

nlohmann::json to_json(const TimeGrid& grid) {
  return {{"t_max", grid.t_max}, {"n_points", grid.n_points}, {"dt", grid.dt()}};
}

nlohmann::json to_json(const CptReport& report) {
  return {{"grid", to_json(report.grid)},
          {"gamma_bar", report.gamma_bar},
          {"min_choi_eigenvalue", report.min_choi_eigenvalue},
          {"max_trace_defect", report.max_trace_defect},
          {"tolerance", {{"choi", report.tolerance.choi}, {"trace", report.tolerance.trace}}},
          {"verdict", report.verdict}};
}

nlohmann::json to_json(const ConvergenceReport& report) {
  nlohmann::json j = {{"gamma_bar", report.gamma_bar},
                      {"tau_max", report.tau_max},
                      {"t_c_values", report.t_c_values},
                      {"errors", report.errors}};
  j["estimated_order"] = report.estimated_order ? nlohmann::json(*report.estimated_order) : nlohmann::json();
  return j;
}

}  // namespace nmc
