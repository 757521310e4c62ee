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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Thresholds are the contract; do not loosen them here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "nmcollide/collision_engine.hpp"
#include "nmcollide/continuous_maps.hpp"
#include "nmcollide/jc_analytic.hpp"
#include "nmcollide/laplace.hpp"
#include "nmcollide/verify.hpp"

using namespace nmc;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// tau in [0, 20] step 0.01, exact grid values j/100.
const TimeGrid kSweepGrid{20.0, 2001};
const std::vector<double> kSweepGammas{0.0, 0.5, 1.0, 2.0, 5.0, 50.0};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome cpt_sweep() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_eig = 1.0, worst_trace = 0.0;
  bool verdict = true;
  for (double g : kSweepGammas) {
    std::vector<Superoperator> maps;
    maps.reserve(kSweepGrid.n_points);
    for (int j = 0; j < kSweepGrid.n_points; ++j)
      maps.push_back(Superoperator::from_kraus(lambda_jc_channel(kSweepGrid.at(j), g)));
    const CptReport r = certify_cpt(maps, kSweepGrid, g, {1e-9, 1e-10});
    verdict = verdict && r.verdict;
    for (int j = 0; j < kSweepGrid.n_points; ++j) {
      worst_eig = std::min(worst_eig, r.min_choi_eigenvalue[j]);
      worst_trace = std::max(worst_trace, r.max_trace_defect[j]);
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = verdict && worst_eig >= -1e-9 && worst_trace <= 1e-10 && secs < 30.0;
  return {pass, "min Choi eig " + fmt(worst_eig) + ", max trace defect " + fmt(worst_trace) + ", " + fmt(secs) +
                    " s (limit 30 s)"};
}

Outcome beta_inequalities() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_low = 0.0, worst_high = 0.0, worst_gap = 0.0;
  for (double g : kSweepGammas)
    for (int j = 0; j < kSweepGrid.n_points; ++j) {
      const double tau = kSweepGrid.at(j);
      const double b1 = beta1(tau, g), b2 = beta2(tau, g);
      worst_low = std::max(worst_low, -b2);
      worst_high = std::max(worst_high, b2 - 1.0);
      worst_gap = std::max(worst_gap, b1 * b1 - b2);
    }
  const double secs = seconds_since(t0);
  const bool pass = worst_low <= 0.0 && worst_high <= 1e-9 && worst_gap <= 1e-9 && secs < 5.0;
  return {pass, "max(-beta2) " + fmt(worst_low) + ", max(beta2-1) " + fmt(worst_high) + ", max(beta1^2-beta2) " +
                    fmt(worst_gap) + ", " + fmt(secs) + " s (limit 5 s)"};
}

Outcome talbot_oracle() {
  double worst = 0.0;
  for (double g : {0.5, 1.0, 2.0, 5.0})
    for (int ell : {1, 2}) {
      const LaplaceFunction f = beta_transform(ell, g);
      for (int k = 1; k <= 100; ++k) {
        const double tau = 0.1 * k;
        const double closed = ell == 1 ? beta1(tau, g) : beta2(tau, g);
        worst = std::max(worst, std::abs(closed - inverse_laplace(f, tau)));
      }
    }
  return {worst <= 1e-8, "max |closed form - inversion| " + fmt(worst) + " (limit 1e-8)"};
}

Outcome series_vs_closed_form() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto kernel = build_kernel_map(jc_coupling(1.0), 2, 2);
  const TimeGrid grid = TimeGrid::with_step(5.0, 1e-3);
  SeriesPolicy policy;
  policy.tail_tol = 1e-8;
  const QubitStateParams rho0{0.5, Complex(0.3, 0.2)};
  const Matrix rho = rho0.density().matrix();
  double worst_state = 0.0, worst_map = 0.0;
  std::string terms;
  for (double g : {0.0, 1.0, 2.0}) {
    const SeriesResult res = lambda_series(kernel, g, grid, policy);
    terms += (terms.empty() ? "" : "/") + std::to_string(res.terms);
    for (int j = 0; j < grid.n_points; ++j) {
      const double tau = grid.at(j);
      const Matrix exact = lambda_jc(tau, g, rho0).matrix();
      worst_state = std::max(worst_state, max_abs(res.maps[j].apply(rho) - exact));
      worst_map = std::max(worst_map, max_abs(res.maps[j].matrix() - beta_map_superop(beta1(tau, g), beta2(tau, g)).matrix()));
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = worst_state <= 1e-4 && worst_map <= 1e-4 && secs < 120.0;
  return {pass, "max state element dev " + fmt(worst_state) + ", max superoperator dev " + fmt(worst_map) +
                    ", terms " + terms + ", " + fmt(secs) + " s (limit 120 s)"};
}

Outcome discrete_convergence() {
  const ConvergenceReport r = convergence_study(1.0, 5.0, {0.1, 0.05, 0.025});
  bool monotone = true;
  for (std::size_t i = 1; i < r.errors.size(); ++i) monotone = monotone && r.errors[i] < r.errors[i - 1];
  const double order = r.estimated_order.value_or(0.0);
  std::ostringstream os;
  os << "errors";
  for (double e : r.errors) os << " " << fmt(e);
  os << ", order " << fmt(order) << " (need monotone, >= 0.8)";
  return {monotone && order >= 0.8, os.str()};
}

Outcome gamma_zero_exactness() {
  CollisionConfig cfg;
  cfg.hamiltonian = jc_coupling(1.0);
  cfg.t_c = 1e-3;
  cfg.p_s = 1.0;
  cfg.n_steps = static_cast<int>(std::floor(2.0 * std::numbers::pi / cfg.t_c));
  const double p = 0.5;
  const Complex r(0.5, 0.0);
  const TrajectoryRecord traj = run_discrete(cfg, DensityOperator::qubit(p, r));
  double worst = 0.0;
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    const double tau = traj.times[n];
    const Complex b1 = traj.states[n](0, 1) / r;
    const double b2 = traj.states[n](1, 1).real() / p;
    worst = std::max({worst, std::abs(b1 - std::cos(tau)), std::abs(b2 - std::cos(tau) * std::cos(tau))});
  }
  return {worst <= 5e-3, "max |beta - cos| over " + std::to_string(traj.states.size()) + " steps " + fmt(worst) +
                             " (limit 5e-3)"};
}

Outcome sliding_window() {
  double worst = 0.0;
  int runs = 0;
  const DensityOperator rho0 = DensityOperator::qubit(0.7, Complex(0.25, -0.2));
  for (bool thermal : {false, true})
    for (double p : {0.0, 0.3, 1.0})
      for (int n = 1; n <= 4; ++n) {
        CollisionConfig cfg;
        cfg.hamiltonian = jc_coupling(1.0);
        cfg.t_c = 0.4;
        cfg.p_s = p;
        cfg.n_steps = n;
        if (thermal) cfg.bath = BathSpec::thermal({0.0, 1.0}, 0.8);
        const TrajectoryRecord a = run_discrete(cfg, rho0);
        const TrajectoryRecord b = brute_force_chain(cfg, rho0);
        for (std::size_t k = 0; k < a.states.size(); ++k)
          worst = std::max(worst, max_abs(a.states[k].matrix() - b.states[k].matrix()));
        ++runs;
      }
  return {worst <= 1e-12, std::to_string(runs) + " runs, max per-step deviation " + fmt(worst) + " (limit 1e-12)"};
}

Outcome thermal_reduction() {
  const DensityOperator rho0 = DensityOperator::qubit(0.6, Complex(0.1, 0.3));
  double engine_dev = 0.0;
  for (double p : {0.0, 0.3, 1.0}) {
    CollisionConfig pure;
    pure.hamiltonian = jc_coupling(1.0);
    pure.t_c = 0.2;
    pure.p_s = p;
    pure.n_steps = 25;
    CollisionConfig cold = pure;
    cold.bath = BathSpec::from_weights({1.0, 0.0});
    const TrajectoryRecord a = run_discrete(pure, rho0);
    const TrajectoryRecord b = run_discrete_thermal(cold, rho0);
    for (std::size_t k = 0; k < a.states.size(); ++k)
      engine_dev = std::max(engine_dev, max_abs(a.states[k].matrix() - b.states[k].matrix()));
  }

  const auto pure_kernel = build_kernel_map(jc_coupling(1.0), 2, 2);
  const auto cold_kernel = build_thermal_kernel_map(jc_coupling(1.0), 2, 2, std::vector<double>{1.0, 0.0});
  const auto hot_kernel = build_thermal_kernel_map(jc_coupling(1.0), 2, 2, {0.0, 1.0}, 0.0);
  const Matrix mixed = DensityOperator::maximally_mixed(2).matrix();
  double kernel_dev = 0.0, fixed_point_dev = 0.0;
  for (int j = 0; j <= 200; ++j) {
    const double t = 0.05 * j;
    kernel_dev = std::max(kernel_dev, max_abs(pure_kernel.superop(t).matrix() - cold_kernel.superop(t).matrix()));
    fixed_point_dev = std::max(fixed_point_dev, max_abs(hot_kernel.superop(t).apply(mixed) - mixed));
  }
  const bool pass = engine_dev <= 1e-12 && kernel_dev <= 1e-12 && fixed_point_dev <= 1e-10;
  return {pass, "engine dev " + fmt(engine_dev) + ", kernel dev " + fmt(kernel_dev) + " (limit 1e-12); beta=0 fixed point dev " +
                    fmt(fixed_point_dev) + " (limit 1e-10)"};
}

Outcome negative_control() {
  std::vector<Superoperator> corrupted;
  for (int j = 0; j < kSweepGrid.n_points; ++j) {
    const double tau = kSweepGrid.at(j);
    corrupted.push_back(beta_map_superop(1.05 * beta1(tau, 1.0), beta2(tau, 1.0)));
  }
  const CptReport r = certify_cpt(corrupted, kSweepGrid, 1.0, {1e-9, 1e-10});
  double worst = 1.0;
  for (double v : r.min_choi_eigenvalue) worst = std::min(worst, v);
  return {!r.verdict, std::string("verdict ") + (r.verdict ? "true" : "false") + ", min Choi eig " + fmt(worst)};
}

Outcome markovian_limit() {
  const double gamma = 0.5, t = 2.0;
  const MemoryKernelMap synthetic([gamma](double s) { return adc_channel(std::exp(-gamma * s)); }, 2, 2,
                                  "amplitude damping, eta = exp(-gamma t)");
  std::vector<double> hs{1e-2, 5e-3, 2.5e-3, 1.25e-3}, pop_err, gen_norm;
  const auto jc = build_kernel_map(jc_coupling(1.0), 2, 2);
  for (double h : hs) {
    const Superoperator s = lindblad_limit(synthetic, h).propagate(t);
    // Excited population from |1><1| is the (3,3) element.
    pop_err.push_back(std::abs(s.matrix()(3, 3).real() - std::exp(-2.0 * gamma * t)));
    gen_norm.push_back(lindblad_limit(jc, h).generator.matrix().norm());
  }
  const double pop_order = log_log_slope(hs, pop_err).value_or(0.0);
  const double jc_slope = log_log_slope(hs, gen_norm).value_or(0.0);
  bool halving = true;
  for (std::size_t i = 1; i < hs.size(); ++i) halving = halving && pop_err[i] < pop_err[i - 1] && gen_norm[i] < gen_norm[i - 1];
  const bool pass = halving && std::abs(pop_order - 1.0) <= 0.1 && std::abs(jc_slope - 1.0) <= 0.1 && pop_err.back() < 1e-2;
  return {pass, "population error " + fmt(pop_err.front()) + " -> " + fmt(pop_err.back()) + " (order " + fmt(pop_order) +
                    "), JC generator norm " + fmt(gen_norm.front()) + " -> " + fmt(gen_norm.back()) + " (slope " +
                    fmt(jc_slope) + ")"};
}

}  // namespace

int main() {
  // Runtime limits are stated for one thread.
  setenv("NMCOLLIDE_THREADS", "1", 1);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"CPT certification sweep", cpt_sweep},
      {"beta inequality sweep", beta_inequalities},
      {"closed form vs inverse Laplace", talbot_oracle},
      {"series vs closed form", series_vs_closed_form},
      {"discrete to continuous convergence", discrete_convergence},
      {"Gamma = 0 exactness", gamma_zero_exactness},
      {"sliding window vs full chain", sliding_window},
      {"thermal reduction", thermal_reduction},
      {"negative control", negative_control},
      {"Markovian limit structure", markovian_limit},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
