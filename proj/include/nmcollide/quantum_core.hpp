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

// Dense complex linear algebra for density operators, Kraus channels and
// composite-system bookkeeping. Composite indices are ordered with the first
// tensor factor slowest (Kronecker convention), and slots are 0-based.

#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nmc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Hermitian operator with a cached eigendecomposition, so propagators
/// e^{-iHt} are exact to rounding for every t.
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix data);

  static HermitianOperator zero(int dim);

  int dim() const { return static_cast<int>(data_.rows()); }
  const Matrix& matrix() const { return data_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

  /// U(t) = exp(-i H t).
  Matrix propagator(double t) const;

 private:
  Matrix data_;
  Eigen::VectorXd eigenvalues_;
  Matrix eigenvectors_;
};

/// Positive semidefinite, unit-trace, Hermitian matrix. Construction
/// validates against the global ToleranceProfile and throws InvariantError.
class DensityOperator {
 public:
  explicit DensityOperator(Matrix data);

  static DensityOperator basis(int dim, int index);
  static DensityOperator pure(const Vector& psi);
  static DensityOperator maximally_mixed(int dim);
  /// Qubit state (1-p)|0><0| + p|1><1| + (r|0><1| + h.c.).
  static DensityOperator qubit(double p, Complex r);

  int dim() const { return static_cast<int>(data_.rows()); }
  const Matrix& matrix() const { return data_; }
  Complex operator()(int row, int col) const { return data_(row, col); }

 private:
  Matrix data_;
};

/// Ordered list of dim_out x dim_in Kraus operators with sum K^dagger K = 1.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<Matrix> operators);

  static KrausChannel identity(int dim);
  static KrausChannel unitary(const Matrix& u);

  int dim_in() const { return dim_in_; }
  int dim_out() const { return dim_out_; }
  const std::vector<Matrix>& operators() const { return operators_; }

  /// max_{ij} |(sum_nu K_nu^dagger K_nu - 1)_{ij}|
  double completeness_defect() const;

 private:
  int dim_in_;
  int dim_out_;
  std::vector<Matrix> operators_;
};

/// Choi matrix sum_{ij} |i><j| (x) Phi(|i><j|) of a map on d x d matrices.
class ChoiMatrix {
 public:
  ChoiMatrix(int dim, Matrix data);

  int dim() const { return dim_; }
  const Matrix& matrix() const { return data_; }

  double min_eigenvalue() const;
  Eigen::VectorXd eigenvalues() const;
  /// |Tr C - d|, zero for trace-preserving maps.
  double trace_defect() const;

 private:
  int dim_;
  Matrix data_;
};

Matrix kron(const Matrix& a, const Matrix& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);
HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);

/// Operator exchanging the two d-dimensional factors of a d (x) d space.
Matrix swap_operator(int dim);

/// Reduced state over `keep` (sorted or not; output keeps ascending slot order).
Matrix partial_trace(const Matrix& joint, std::span<const int> dims, std::span<const int> keep);
DensityOperator partial_trace(const DensityOperator& joint, std::span<const int> dims,
                              std::span<const int> keep);

/// Lift `op`, acting on the listed slots in the listed order, to the full space.
Matrix embed_operator(const Matrix& op, std::span<const int> dims, std::span<const int> slots);

/// op_slots * state * op_slots^dagger without forming the embedded operator.
Matrix conjugate_on_slots(const Matrix& state, const Matrix& op, std::span<const int> dims,
                          std::span<const int> slots);

DensityOperator apply_channel(const KrausChannel& channel, const DensityOperator& rho);
Matrix apply_kraus(const KrausChannel& channel, const Matrix& rho);

/// a after b: rho -> a(b(rho)).
KrausChannel compose(const KrausChannel& a, const KrausChannel& b);

ChoiMatrix choi_of(const KrausChannel& channel);

double trace_distance(const DensityOperator& a, const DensityOperator& b);
/// Same on raw matrices; for outputs of approximate (quadrature) maps.
double trace_distance(const Matrix& a, const Matrix& b);

/// Smallest eigenvalue of the Hermitian part of m.
double min_hermitian_eigenvalue(const Matrix& m);
double max_abs(const Matrix& m);

}  // namespace nmc
