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

#pragma once

#include "nmcollide/quantum_core.hpp"

namespace nmc {

/// Linear map on d x d matrices stored as a d^2 x d^2 matrix acting on
/// column-stacked vec(rho), i.e. vec(A rho B) = (B^T (x) A) vec(rho).
///
/// Unlike KrausChannel this carries maps that are only approximately CP
/// (quadrature sums) or deliberately not CP at all (negative controls), so
/// construction does not validate anything beyond shape.
class Superoperator {
 public:
  Superoperator(int dim, Matrix data);

  static Superoperator identity(int dim);
  static Superoperator zero(int dim);
  static Superoperator from_kraus(const KrausChannel& channel);

  int dim() const { return dim_; }
  const Matrix& matrix() const { return data_; }

  Matrix apply(const Matrix& rho) const;
  DensityOperator apply(const DensityOperator& rho) const;

  /// this after other.
  Superoperator then_after(const Superoperator& other) const;

  /// Same Choi convention as choi_of(KrausChannel). Throws InvariantError if
  /// the map is not Hermiticity-preserving.
  ChoiMatrix choi() const;

  /// max over basis inputs |i><j| of |Tr Phi(|i><j|) - delta_ij|.
  double trace_defect() const;

  /// Kraus form from the Choi eigendecomposition; eigenvalues in
  /// [-choi_positivity, 0) are dropped, anything more negative throws.
  KrausChannel to_kraus() const;

  Superoperator operator+(const Superoperator& other) const;
  Superoperator operator-(const Superoperator& other) const;
  Superoperator operator*(double scale) const;

 private:
  int dim_;
  Matrix data_;
};

/// Reshuffle between the vec-superoperator and the Choi layout; an involution.
Matrix superop_to_choi(const Matrix& superop, int dim);
Matrix choi_to_superop(const Matrix& choi, int dim);

}  // namespace nmc
