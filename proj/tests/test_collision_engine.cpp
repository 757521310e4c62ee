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

#include <doctest.h>

#include <cmath>

#include "nmcollide/collision_engine.hpp"
#include "nmcollide/continuous_maps.hpp"
#include "nmcollide/errors.hpp"
#include "nmcollide/jc_analytic.hpp"
#include "nmcollide/verify.hpp"
#include "test_support.hpp"

using namespace nmc;
using nmc::testing::diff;

namespace {

CollisionConfig jc_config(double t_c, double p_s, int n) {
  CollisionConfig cfg;
  cfg.hamiltonian = jc_coupling(1.0);
  cfg.t_c = t_c;
  cfg.p_s = p_s;
  cfg.n_steps = n;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  CollisionConfig cfg = jc_config(0.1, 0.5, 3);
  CHECK_NOTHROW(cfg.validate());
  cfg.p_s = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = jc_config(0.0, 0.5, 3);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = jc_config(0.1, 0.5, 0);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = jc_config(0.1, 0.5, 2);
  cfg.ancilla_dim = 3;  // hamiltonian is 4x4
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = jc_config(0.1, 0.5, 2);
  cfg.bath = BathSpec::from_weights({0.2, 0.3, 0.5});
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(run_discrete(jc_config(0.1, 0.5, 2), DensityOperator::basis(3, 0)), ConfigError);
}

TEST_CASE("bath weights") {
  const auto w = thermal_weights({0.0, 1.0}, 2.0);
  CHECK(w[0] == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
  CHECK(w[0] + w[1] == doctest::Approx(1.0));
  const auto flat = thermal_weights({0.0, 1.0, 5.0}, 0.0);
  for (double x : flat) CHECK(x == doctest::Approx(1.0 / 3.0));
  // Huge beta must not overflow.
  const auto cold = thermal_weights({0.0, 1.0}, 1e6);
  CHECK(cold[0] == 1.0);
  CHECK(cold[1] == 0.0);
  CHECK_THROWS_AS(BathSpec::thermal({0.0, 1.0}, -1.0), ConfigError);
  CHECK_THROWS_AS(BathSpec::from_weights({0.5, 0.6}), ConfigError);
}

TEST_CASE("purified pair marginal is the thermal state") {
  const std::vector<double> w{0.7, 0.2, 0.1};
  const Vector psi = purified_pair_state(w);
  const DensityOperator pair = DensityOperator::pure(psi);
  const Matrix marginal = partial_trace(pair.matrix(), std::vector<int>{3, 3}, std::vector<int>{0});
  Matrix expected = Matrix::Zero(3, 3);
  for (int k = 0; k < 3; ++k) expected(k, k) = w[k];
  CHECK(diff(marginal, expected) < 1e-15);
}

TEST_CASE("partial swap channel") {
  const KrausChannel s = partial_swap_channel(2, 0.3);
  CHECK(s.completeness_defect() < 1e-15);
  std::mt19937_64 rng(2);
  const DensityOperator a = nmc::testing::random_state(2, rng), b = nmc::testing::random_state(2, rng);
  const Matrix out = apply_kraus(s, kron(a.matrix(), b.matrix()));
  CHECK(diff(out, 0.7 * kron(a.matrix(), b.matrix()) + 0.3 * kron(b.matrix(), a.matrix())) < 1e-14);
}

TEST_CASE("single step ignores the swap probability") {
  const DensityOperator rho0 = DensityOperator::qubit(0.6, Complex(0.2, 0.1));
  const Matrix joint = kron(rho0.matrix(), DensityOperator::basis(2, 0).matrix());
  const DensityOperator direct =
      partial_trace(sa_collision(DensityOperator(joint), jc_coupling(1.0), 0.4), std::vector<int>{2, 2},
                    std::vector<int>{0});
  for (double p : {0.0, 0.37, 1.0}) {
    const TrajectoryRecord r = run_discrete(jc_config(0.4, p, 1), rho0);
    REQUIRE(r.states.size() == 2);
    CHECK(diff(r.states[1].matrix(), direct.matrix()) < 1e-15);
  }
}

TEST_CASE("p_s = 0 is a Markovian chain of fresh collisions") {
  // Each step applies A(cos t_c); n steps give A(cos^n t_c).
  const double t_c = 0.3;
  const QubitStateParams q{0.8, Complex(0.1, -0.3)};
  const TrajectoryRecord r = run_discrete(jc_config(t_c, 0.0, 6), q.density());
  for (int n = 0; n <= 6; ++n) {
    const double eta = std::pow(std::cos(t_c), n);
    const DensityOperator expected = apply_channel(adc_channel(std::abs(eta)), q.density());
    CHECK(std::abs(r.states[n](1, 1).real() - expected(1, 1).real()) < 1e-14);
    CHECK(std::abs(r.states[n](0, 1) - eta * q.r) < 1e-14);
  }
}

TEST_CASE("p_s = 1 keeps one persistent ancilla") {
  // Full swaps hand the same ancilla state along: rho_n = E(n t_c) rho_0.
  const double t_c = 0.25;
  const QubitStateParams q{0.9, Complex(0.2, 0.1)};
  const TrajectoryRecord r = run_discrete(jc_config(t_c, 1.0, 12), q.density());
  for (int n = 0; n <= 12; ++n) {
    const double c = std::cos(n * t_c);
    CHECK(std::abs(r.states[n](1, 1).real() - c * c * q.p) < 1e-13);
    CHECK(std::abs(r.states[n](0, 1) - c * q.r) < 1e-13);
    CHECK(r.times[n] == doctest::Approx(n * t_c));
  }
}

TEST_CASE("p_s = 1 with a thermal bath follows the thermal kernel") {
  const std::vector<double> w{0.75, 0.25};
  CollisionConfig cfg = jc_config(0.2, 1.0, 8);
  cfg.bath = BathSpec::from_weights(w);
  const MemoryKernelMap kernel = build_thermal_kernel_map(jc_coupling(1.0), 2, 2, w);
  const DensityOperator rho0 = DensityOperator::qubit(0.3, Complex(0.1, 0.1));
  const TrajectoryRecord r = run_discrete(cfg, rho0);
  for (int n = 0; n <= 8; ++n)
    CHECK(diff(r.states[n].matrix(), apply_channel(kernel.channel(n * 0.2), rho0).matrix()) < 1e-13);
}

TEST_CASE("sliding window equals the full chain for random couplings") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 3; ++trial) {
    CollisionConfig cfg;
    cfg.hamiltonian = nmc::testing::random_hermitian(4, rng);
    cfg.t_c = 0.3 + 0.2 * trial;
    cfg.p_s = 0.25 * (trial + 1);
    cfg.n_steps = 4;
    const DensityOperator rho0 = nmc::testing::random_state(2, rng);
    const TrajectoryRecord fast = run_discrete(cfg, rho0);
    const TrajectoryRecord slow = brute_force_chain(cfg, rho0);
    for (int n = 0; n <= 4; ++n) CHECK(diff(fast.states[n].matrix(), slow.states[n].matrix()) < 1e-12);
  }
}

TEST_CASE("qutrit system with qubit ancillas") {
  std::mt19937_64 rng(41);
  CollisionConfig cfg;
  cfg.system_dim = 3;
  cfg.ancilla_dim = 2;
  cfg.hamiltonian = nmc::testing::random_hermitian(6, rng);
  cfg.t_c = 0.5;
  cfg.p_s = 0.6;
  cfg.n_steps = 3;
  const DensityOperator rho0 = nmc::testing::random_state(3, rng);
  const TrajectoryRecord fast = run_discrete(cfg, rho0);
  const TrajectoryRecord slow = brute_force_chain(cfg, rho0);
  for (int n = 0; n <= 3; ++n) CHECK(diff(fast.states[n].matrix(), slow.states[n].matrix()) < 1e-12);
}

TEST_CASE("thermal dispatch") {
  CollisionConfig cfg = jc_config(0.1, 0.5, 2);
  CHECK_THROWS_AS(run_discrete_thermal(cfg, DensityOperator::basis(2, 1)), ConfigError);
  cfg.bath = BathSpec::thermal({0.0, 1.0}, 0.5);
  const auto a = run_discrete(cfg, DensityOperator::basis(2, 1));
  const auto b = run_discrete_thermal(cfg, DensityOperator::basis(2, 1));
  CHECK(diff(a.states.back().matrix(), b.states.back().matrix()) == 0.0);
}
