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

// Discrete collision protocol: S collides with ancilla 1; thereafter every
// step n >= 2 is the partial swap between ancillas n-1 and n followed by the
// S-n collision. Ancilla n-1 never interacts again once the swap is done,
// so the engine only carries the joint state of S and the current ancilla.

#pragma once

#include <vector>

#include "nmcollide/quantum_core.hpp"

namespace nmc {

enum class BathKind { pure_ground, thermal };

/// Initial single-ancilla state: the ground projector |0><0|, or a thermal
/// mixture sum_k w_k |k><k| that the engine purifies into an ancilla pair.
class BathSpec {
 public:
  static BathSpec pure_ground();
  /// Boltzmann weights e^{-beta eps_k}/Z; beta must be finite and >= 0.
  static BathSpec thermal(std::vector<double> energies, double inverse_temperature);
  /// Thermal bath given directly by its populations. (1, 0, ...) stands in
  /// for beta -> infinity.
  static BathSpec from_weights(std::vector<double> weights);

  BathKind kind() const { return kind_; }
  const std::vector<double>& energies() const { return energies_; }
  double inverse_temperature() const { return inverse_temperature_; }
  /// Populations of the single-ancilla state; empty for pure_ground.
  const std::vector<double>& weights() const { return weights_; }

 private:
  BathKind kind_ = BathKind::pure_ground;
  std::vector<double> energies_;
  double inverse_temperature_ = 0.0;
  std::vector<double> weights_;
};

/// e^{-beta eps_k} / Z, computed with the ground energy factored out.
std::vector<double> thermal_weights(const std::vector<double>& energies, double inverse_temperature);

/// sum_k sqrt(w_k) |k>|k>, whose first-factor marginal is diag(w).
Vector purified_pair_state(const std::vector<double>& weights);

struct CollisionConfig {
  int system_dim = 2;
  int ancilla_dim = 2;
  HermitianOperator hamiltonian = HermitianOperator::zero(4);  // on system (x) ancilla
  double t_c = 0.1;
  double p_s = 0.0;
  int n_steps = 1;
  BathSpec bath = BathSpec::pure_ground();

  /// Throws ConfigError on any invariant violation.
  void validate() const;
};

struct TrajectoryRecord {
  std::vector<DensityOperator> states;  // rho_0 .. rho_{n_steps}
  std::vector<double> times;            // n * t_c
};

/// What S actually collides with: a bare ancilla (pure bath) or a purified
/// ancilla pair (thermal bath), together with the coupling lifted onto it.
struct CollisionUnit {
  int dim;
  Matrix initial_state;           // unit_dim x unit_dim
  HermitianOperator coupling;     // on system (x) unit
};

CollisionUnit make_collision_unit(const CollisionConfig& cfg);

/// sqrt(1-p_s) 1 and sqrt(p_s) SWAP on d (x) d.
KrausChannel partial_swap_channel(int dim, double p_s);

/// e^{-iHt} rho e^{iHt}.
DensityOperator sa_collision(const DensityOperator& joint, const HermitianOperator& hamiltonian,
                             double t_c);

/// Dispatches on cfg.bath.kind().
TrajectoryRecord run_discrete(const CollisionConfig& cfg, const DensityOperator& rho0);
TrajectoryRecord run_discrete_thermal(const CollisionConfig& cfg, const DensityOperator& rho0);

}  // namespace nmc
