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

// Time convolution of superoperator-valued samples on a uniform grid,
//
//   out(t_j) = integral_0^{t_j} a(s) b(t_j - s) ds ~ dt * sum_m w_m a_m b_{j-m},
//
// the O(n^2) inner loop of the dynamical-map series. The serial version is
// the reference; the OpenMP version must agree with it to rounding.

#pragma once

#include <vector>

#include "nmcollide/quantum_core.hpp"

namespace nmc {

/// Superoperators (d^2 x d^2 blocks) sampled on a uniform grid, stored
/// contiguously one column-major block after another.
class SuperopGrid {
 public:
  SuperopGrid(int dim, int n_points);

  int dim() const { return dim_; }
  int block() const { return dim_ * dim_; }
  int size() const { return n_points_; }

  Eigen::Map<Matrix> operator[](int j);
  Eigen::Map<const Matrix> operator[](int j) const;

  /// max_j ||block_j||_F
  double sup_norm() const;

  void set_zero();
  /// this += scale * other, blockwise.
  void add_scaled(const SuperopGrid& other, double scale);

  const Complex* data() const { return data_.data(); }
  Complex* data() { return data_.data(); }

 private:
  int dim_;
  int n_points_;
  std::vector<Complex> data_;
};

/// Quadrature rule over the j + 1 samples of [0, t_j]. Both rules have
/// positive weights, so a convolution of CP maps stays CP. gregory is exact
/// for cubics once j >= 2 (Simpson, 3/8 and Boole for j = 2..4, end-corrected
/// trapezoid with 3/8, 7/6, 23/24 beyond); j = 1 is always the trapezoid.
enum class Quadrature { trapezoid, gregory };

/// Weights w_0..w_j (without the dt factor).
std::vector<double> quadrature_weights(int j, Quadrature rule);

void convolve_serial(const SuperopGrid& a, const SuperopGrid& b, double dt, SuperopGrid& out,
                     Quadrature rule = Quadrature::gregory);
void convolve_parallel(const SuperopGrid& a, const SuperopGrid& b, double dt, SuperopGrid& out,
                       Quadrature rule = Quadrature::gregory);

/// Threads available to the parallel kernels (honours NMCOLLIDE_THREADS).
int kernel_threads();

}  // namespace nmc
