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

#include "nmcollide/collision_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "nmcollide/errors.hpp"
#include "nmcollide/tolerance.hpp"

namespace nmc {

BathSpec BathSpec::pure_ground() { return BathSpec{}; }

BathSpec BathSpec::thermal(std::vector<double> energies, double inverse_temperature) {
  BathSpec spec;
  spec.kind_ = BathKind::thermal;
  spec.weights_ = thermal_weights(energies, inverse_temperature);
  spec.energies_ = std::move(energies);
  spec.inverse_temperature_ = inverse_temperature;
  return spec;
}

BathSpec BathSpec::from_weights(std::vector<double> weights) {
  if (weights.empty()) throw ConfigError("bath weights must be nonempty");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("bath weights must be finite and >= 0");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("bath weights must sum to 1");
  BathSpec spec;
  spec.kind_ = BathKind::thermal;
  spec.inverse_temperature_ = std::numeric_limits<double>::infinity();
  spec.weights_ = std::move(weights);
  return spec;
}

std::vector<double> thermal_weights(const std::vector<double>& energies, double inverse_temperature) {
  if (energies.empty()) throw ConfigError("thermal bath requires at least one energy level");
  if (!std::isfinite(inverse_temperature) || inverse_temperature < 0.0)
    throw ConfigError("inverse temperature must be finite and >= 0");
  for (double e : energies)
    if (!std::isfinite(e)) throw ConfigError("ancilla energies must be finite");
  const double ground = *std::min_element(energies.begin(), energies.end());
  std::vector<double> w(energies.size());
  std::transform(energies.begin(), energies.end(), w.begin(),
                 [&](double e) { return std::exp(-inverse_temperature * (e - ground)); });
  const double z = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= z;
  return w;
}

Vector purified_pair_state(const std::vector<double>& weights) {
  const int d = static_cast<int>(weights.size());
  Vector psi = Vector::Zero(d * d);
  for (int k = 0; k < d; ++k) psi(k * d + k) = std::sqrt(weights[k]);
  return psi;
}

void CollisionConfig::validate() const {
  if (system_dim <= 0 || ancilla_dim <= 0) throw ConfigError("system and ancilla dims must be positive");
  if (hamiltonian.dim() != system_dim * ancilla_dim) {
    std::ostringstream os;
    os << "hamiltonian dimension " << hamiltonian.dim() << " does not match system_dim*ancilla_dim = "
       << system_dim * ancilla_dim;
    throw ConfigError(os.str());
  }
  if (!(t_c > 0.0) || !std::isfinite(t_c)) throw ConfigError("collision time t_c must be > 0");
  if (!(p_s >= 0.0 && p_s <= 1.0)) throw ConfigError("swap probability p_s must lie in [0, 1]");
  if (n_steps < 1) throw ConfigError("n_steps must be >= 1");
  if (bath.kind() == BathKind::thermal && static_cast<int>(bath.weights().size()) != ancilla_dim)
    throw ConfigError("thermal bath needs exactly ancilla_dim energies/weights");
}

CollisionUnit make_collision_unit(const CollisionConfig& cfg) {
  cfg.validate();
  if (cfg.bath.kind() == BathKind::pure_ground) {
    Matrix ground = Matrix::Zero(cfg.ancilla_dim, cfg.ancilla_dim);
    ground(0, 0) = 1.0;
    return {cfg.ancilla_dim, std::move(ground), cfg.hamiltonian};
  }
  // The fictitious partner i2 never couples to S: H (x) 1 on S (x) i1 (x) i2.
  const int d = cfg.ancilla_dim;
  const Vector psi = purified_pair_state(cfg.bath.weights());
  HermitianOperator lifted(kron(cfg.hamiltonian.matrix(), Matrix::Identity(d, d)));
  return {d * d, psi * psi.adjoint(), std::move(lifted)};
}

KrausChannel partial_swap_channel(int dim, double p_s) {
  if (!(p_s >= 0.0 && p_s <= 1.0)) throw ConfigError("swap probability p_s must lie in [0, 1]");
  if (dim <= 0) throw ConfigError("partial_swap_channel: dimension must be positive");
  return KrausChannel({std::sqrt(1.0 - p_s) * Matrix::Identity(dim * dim, dim * dim),
                       std::sqrt(p_s) * swap_operator(dim)});
}

DensityOperator sa_collision(const DensityOperator& joint, const HermitianOperator& hamiltonian,
                             double t_c) {
  if (joint.dim() != hamiltonian.dim()) throw ConfigError("sa_collision: dimension mismatch");
  const Matrix u = hamiltonian.propagator(t_c);
  return DensityOperator(u * joint.matrix() * u.adjoint());
}

namespace {

// exp(-iHt) is unitary only to the last bit, so over thousands of steps the
// window's trace walks away from 1 (about 1e-12 after 6000 steps). Project the
// rounding back out each step; a per-step defect above tolerance is a real
// bug and still throws.
void restore_window(Matrix& window) {
  const Complex tr = window.trace();
  if (std::abs(tr - Complex(1.0)) > tolerances().unit_trace) {
    std::ostringstream os;
    os << "collision step: window trace differs from 1 by " << std::abs(tr - Complex(1.0));
    throw InvariantError(os.str());
  }
  window = (0.5 / tr.real()) * (window + window.adjoint());
}

TrajectoryRecord run_sliding_window(const CollisionConfig& cfg, const DensityOperator& rho0) {
  if (rho0.dim() != cfg.system_dim) throw ConfigError("initial state does not match system_dim");
  const CollisionUnit unit = make_collision_unit(cfg);
  const int ds = cfg.system_dim;
  const int du = unit.dim;
  const Matrix u = unit.coupling.propagator(cfg.t_c);
  const Matrix u_dag = u.adjoint();
  const KrausChannel swap = partial_swap_channel(du, cfg.p_s);

  const std::array<int, 2> window_dims{ds, du};
  const std::array<int, 1> keep_system{0};
  const std::array<int, 3> chain_dims{ds, du, du};
  const std::array<int, 2> ancilla_pair{1, 2};
  const std::array<int, 2> keep_system_new{0, 2};

  TrajectoryRecord record;
  record.states.reserve(cfg.n_steps + 1);
  record.times.reserve(cfg.n_steps + 1);
  record.states.push_back(rho0);
  record.times.push_back(0.0);

  Matrix window = u * kron(rho0.matrix(), unit.initial_state) * u_dag;
  restore_window(window);
  record.states.emplace_back(partial_trace(window, window_dims, keep_system));
  record.times.push_back(cfg.t_c);

  for (int n = 2; n <= cfg.n_steps; ++n) {
    const Matrix chain = kron(window, unit.initial_state);  // S, ancilla n-1, ancilla n
    Matrix swapped = Matrix::Zero(chain.rows(), chain.cols());
    for (const auto& k : swap.operators()) swapped += conjugate_on_slots(chain, k, chain_dims, ancilla_pair);
    window = partial_trace(swapped, chain_dims, keep_system_new);
    window = u * window * u_dag;
    restore_window(window);
    record.states.emplace_back(partial_trace(window, window_dims, keep_system));
    record.times.push_back(n * cfg.t_c);
  }
  return record;
}

}  // namespace

TrajectoryRecord run_discrete(const CollisionConfig& cfg, const DensityOperator& rho0) {
  cfg.validate();
  return run_sliding_window(cfg, rho0);
}

TrajectoryRecord run_discrete_thermal(const CollisionConfig& cfg, const DensityOperator& rho0) {
  if (cfg.bath.kind() != BathKind::thermal)
    throw ConfigError("run_discrete_thermal requires a thermal bath");
  cfg.validate();
  return run_sliding_window(cfg, rho0);
}

}  // namespace nmc
