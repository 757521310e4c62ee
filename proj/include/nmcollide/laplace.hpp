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

// Fixed-Talbot numerical inversion of Laplace transforms (Abate & Valko).
//
// The contour s(theta) = r theta (cot theta + i), r = 2M / (5t), amplifies
// rounding by roughly e^{2M/5} while discretization error falls like
// 10^{-0.6 M}. In long double (64-bit mantissa) the two cross near M = 48,
// which keeps ~12 digits for t up to ~10 on unit-scale poles. Transforms are
// evaluated in the same precision.

#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace nmc {

using ComplexLD = std::complex<long double>;
using MatrixLD = Eigen::Matrix<ComplexLD, Eigen::Dynamic, Eigen::Dynamic>;

using LaplaceFunction = std::function<ComplexLD(ComplexLD)>;
using MatrixLaplaceFunction = std::function<MatrixLD(ComplexLD)>;

inline constexpr int kDefaultTalbotNodes = 48;

/// f(t) from F(s) = L[f](s). F must be analytic to the right of the contour,
/// which encloses singularities with |Im s| below about 0.6 n_nodes / t.
/// Throws ConfigError for t <= 0 or n_nodes < 2, NumericalError if the
/// quadrature sum is not finite.
double inverse_laplace(const LaplaceFunction& transform, double t, int n_nodes = kDefaultTalbotNodes);

/// Entrywise inversion of a matrix-valued transform (real and imaginary parts
/// of the original kept).
MatrixLD inverse_laplace_matrix(const MatrixLaplaceFunction& transform, double t,
                                int n_nodes = kDefaultTalbotNodes);

}  // namespace nmc
