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

// Continuous-time maps of the collision model.
//
// The memory kernel E(t) is the channel S undergoes while interacting
// coherently with a single ancilla for a time t. The dynamical map is the
// weighted auto-convolution series
//
//   Lambda(t) = sum_{k>=1} T_k(t),   T_1(t) = e^{-Gamma t} E(t),
//   T_{k+1}(t) = Gamma * integral_0^t T_1(s) T_k(t - s) ds,
//
// i.e. e^{-Gamma t} Gamma^{k-1} times the k-fold convolution of E. Every
// term is a positive combination of compositions of CPT maps.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nmcollide/convolution.hpp"
#include "nmcollide/laplace.hpp"
#include "nmcollide/superoperator.hpp"

namespace nmc {

/// Superoperator of a Hamiltonian-generated kernel as a sum of oscillating
/// exponentials, E(t) = sum_k coefficient_k e^{i frequency_k t}. Gives the
/// kernel's Laplace transform in closed form.
struct KernelSpectrum {
  std::vector<double> frequencies;
  std::vector<Matrix> coefficients;

  Matrix at(double t) const;
  MatrixLD laplace(ComplexLD s) const;
};

class MemoryKernelMap {
 public:
  using Builder = std::function<KrausChannel(double)>;

  MemoryKernelMap(Builder builder, int system_dim, int ancilla_dim, std::string description,
                  std::optional<KernelSpectrum> spectrum = std::nullopt);

  KrausChannel channel(double t) const { return builder_(t); }
  Superoperator superop(double t) const { return Superoperator::from_kraus(builder_(t)); }

  int system_dim() const { return system_dim_; }
  int ancilla_dim() const { return ancilla_dim_; }
  const std::string& description() const { return description_; }
  /// Present for kernels built from a Hamiltonian.
  const std::optional<KernelSpectrum>& spectrum() const { return spectrum_; }

 private:
  Builder builder_;
  int system_dim_;
  int ancilla_dim_;
  std::string description_;
  std::optional<KernelSpectrum> spectrum_;
};

struct TimeGrid {
  double t_max = 1.0;
  int n_points = 2;

  static TimeGrid with_step(double t_max, double dt);

  double dt() const { return t_max / (n_points - 1); }
  double at(int j) const { return j == n_points - 1 ? t_max : j * dt(); }
  void validate() const;
};

struct SeriesPolicy {
  int k_max = 200;
  double tail_tol = 1e-8;
  bool parallel = true;
  /// trapezoid leaves an O(dt^2) trace defect; gregory brings it to O(dt^4).
  Quadrature quadrature = Quadrature::gregory;

  void validate() const;
};

struct SeriesResult {
  TimeGrid grid;
  std::vector<Superoperator> maps;  // Lambda(t_j)
  int terms = 0;                    // number of T_k summed
  double residual = 0.0;            // sup-norm of the last term
  std::vector<double> term_norms;   // sup-norm of each T_k
};

/// Called after each term is added with the order k and the partial sum.
using SeriesObserver = std::function<void(int, const SuperopGrid&)>;

/// E(t) rho = sum_nu <nu| e^{-iHt} (rho (x) |init><init|) e^{iHt} |nu>, with
/// H on system (x) ancilla.
MemoryKernelMap build_kernel_map(const HermitianOperator& hamiltonian, int system_dim, int ancilla_dim,
                                 int ancilla_init = 0);

/// Kernel for an ancilla starting in the thermal mixture diag(weights):
/// Kraus operators sqrt(w_k) <nu| e^{-iHt} |k> over all (k, nu).
MemoryKernelMap build_thermal_kernel_map(const HermitianOperator& hamiltonian, int system_dim,
                                         int ancilla_dim, const std::vector<double>& weights);
MemoryKernelMap build_thermal_kernel_map(const HermitianOperator& hamiltonian, int system_dim,
                                         int ancilla_dim, const std::vector<double>& energies,
                                         double inverse_temperature);

/// Samples of E(t_j) on the grid as superoperators (parallel over j).
SuperopGrid sample_kernel(const MemoryKernelMap& kernel, const TimeGrid& grid);

/// Lambda(t_j) for Gamma >= 0 via the convolution series, one quadrature
/// pass per order.
/// Throws TruncationError if the last term still exceeds policy.tail_tol
/// after policy.k_max terms.
SeriesResult lambda_series(const MemoryKernelMap& kernel, double gamma, const TimeGrid& grid,
                           const SeriesPolicy& policy = {}, const SeriesObserver& observer = {});

/// Alternative backend: Lambda~(s) = E~(s+Gamma) [1 - Gamma E~(s+Gamma)]^{-1}
/// inverted on the Talbot contour. Needs a kernel with a spectrum.
std::vector<Superoperator> lambda_resolvent(const MemoryKernelMap& kernel, double gamma,
                                            const std::vector<double>& times,
                                            int n_nodes = kDefaultTalbotNodes);

/// Generator of the memoryless limit, G ~ dE/dt at t = 0.
struct LindbladLimit {
  double h;
  Superoperator generator;               // (E(h) - 1) / h
  Superoperator generator_second_order;  // (-3 + 4 E(h) - E(2h)) / (2h)

  /// e^{G t}.
  Superoperator propagate(double t) const;
};

LindbladLimit lindblad_limit(const MemoryKernelMap& kernel, double h = 1e-3);

}  // namespace nmc
