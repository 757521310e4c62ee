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

#include "nmcollide/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nmcollide/errors.hpp"
#include "nmcollide/tolerance.hpp"

namespace nmc {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a nonempty square matrix, got " << m.rows() << "x" << m.cols();
    throw ConfigError(os.str());
  }
}

double hermiticity_defect(const Matrix& m) { return max_abs(m - m.adjoint()); }

// Offsets of every multi-index over `slots` within the full composite index.
std::vector<int> slot_offsets(std::span<const int> dims, std::span<const int> slots) {
  std::vector<int> strides(dims.size(), 1);
  for (int s = static_cast<int>(dims.size()) - 2; s >= 0; --s) strides[s] = strides[s + 1] * dims[s + 1];

  std::vector<int> offsets{0};
  for (int slot : slots) {
    std::vector<int> next;
    next.reserve(offsets.size() * dims[slot]);
    for (int base : offsets)
      for (int digit = 0; digit < dims[slot]; ++digit) next.push_back(base + digit * strides[slot]);
    offsets = std::move(next);
  }
  return offsets;
}

int checked_total(std::span<const int> dims) {
  if (dims.empty()) throw ConfigError("composite dims must be nonempty");
  int total = 1;
  for (int d : dims) {
    if (d <= 0) throw ConfigError("composite dims must be positive");
    total *= d;
  }
  return total;
}

std::vector<int> validated_slots(std::span<const int> dims, std::span<const int> slots) {
  std::vector<int> sorted(slots.begin(), slots.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.empty()) throw ConfigError("slot set must be nonempty");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("slot set contains duplicates");
  if (sorted.front() < 0 || sorted.back() >= static_cast<int>(dims.size()))
    throw ConfigError("slot index out of range");
  return sorted;
}

std::vector<int> complement(int n, const std::vector<int>& sorted_slots) {
  std::vector<int> rest;
  for (int s = 0; s < n; ++s)
    if (!std::binary_search(sorted_slots.begin(), sorted_slots.end(), s)) rest.push_back(s);
  return rest;
}

}  // namespace

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double min_hermitian_eigenvalue(const Matrix& m) {
  const Matrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------

HermitianOperator::HermitianOperator(Matrix data) : data_(std::move(data)) {
  require_square(data_, "HermitianOperator");
  const double defect = hermiticity_defect(data_);
  if (defect > tolerances().hermiticity) {
    std::ostringstream os;
    os << "HermitianOperator: matrix is not Hermitian (defect " << defect << ")";
    throw InvariantError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (data_ + data_.adjoint()));
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

HermitianOperator HermitianOperator::zero(int dim) {
  return HermitianOperator(Matrix::Zero(dim, dim));
}

Matrix HermitianOperator::propagator(double t) const {
  const Vector phases = (eigenvalues_.cast<Complex>() * Complex(0.0, -t)).array().exp();
  return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

// ---------------------------------------------------------------------------

DensityOperator::DensityOperator(Matrix data) : data_(std::move(data)) {
  require_square(data_, "DensityOperator");
  const auto& tol = tolerances();
  const double herm = hermiticity_defect(data_);
  if (herm > tol.hermiticity) {
    std::ostringstream os;
    os << "DensityOperator: not Hermitian (defect " << herm << ")";
    throw InvariantError(os.str());
  }
  const double trace_defect = std::abs(data_.trace() - Complex(1.0));
  if (trace_defect > tol.unit_trace) {
    std::ostringstream os;
    os << "DensityOperator: trace differs from 1 by " << trace_defect;
    throw InvariantError(os.str());
  }
  const double min_eig = min_hermitian_eigenvalue(data_);
  if (min_eig < -tol.positivity) {
    std::ostringstream os;
    os << "DensityOperator: negative eigenvalue " << min_eig;
    throw InvariantError(os.str());
  }
}

DensityOperator DensityOperator::basis(int dim, int index) {
  if (dim <= 0 || index < 0 || index >= dim) throw ConfigError("basis state index out of range");
  Matrix m = Matrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return DensityOperator(std::move(m));
}

DensityOperator DensityOperator::pure(const Vector& psi) {
  const double norm = psi.norm();
  if (psi.size() == 0 || norm == 0.0) throw ConfigError("pure state vector must be nonzero");
  const Vector unit = psi / norm;
  return DensityOperator(unit * unit.adjoint());
}

DensityOperator DensityOperator::maximally_mixed(int dim) {
  if (dim <= 0) throw ConfigError("dimension must be positive");
  return DensityOperator(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityOperator DensityOperator::qubit(double p, Complex r) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("qubit population p must lie in [0, 1]");
  if (std::norm(r) > p * (1.0 - p) + tolerances().positivity)
    throw ConfigError("qubit coherence violates |r|^2 <= p(1-p)");
  Matrix m(2, 2);
  m << 1.0 - p, r, std::conj(r), p;
  return DensityOperator(std::move(m));
}

// ---------------------------------------------------------------------------

KrausChannel::KrausChannel(std::vector<Matrix> operators) : operators_(std::move(operators)) {
  if (operators_.empty()) throw ConfigError("KrausChannel: empty operator list");
  dim_out_ = static_cast<int>(operators_.front().rows());
  dim_in_ = static_cast<int>(operators_.front().cols());
  if (dim_in_ == 0 || dim_out_ == 0) throw ConfigError("KrausChannel: empty operator");
  for (const auto& k : operators_)
    if (k.rows() != dim_out_ || k.cols() != dim_in_)
      throw ConfigError("KrausChannel: operators have inconsistent shapes");
  const double defect = completeness_defect();
  if (defect > tolerances().kraus_completeness) {
    std::ostringstream os;
    os << "KrausChannel: sum K^dagger K differs from identity by " << defect;
    throw InvariantError(os.str());
  }
}

KrausChannel KrausChannel::identity(int dim) { return KrausChannel({Matrix::Identity(dim, dim)}); }

KrausChannel KrausChannel::unitary(const Matrix& u) { return KrausChannel({u}); }

double KrausChannel::completeness_defect() const {
  Matrix sum = Matrix::Zero(dim_in_, dim_in_);
  for (const auto& k : operators_) sum.noalias() += k.adjoint() * k;
  return max_abs(sum - Matrix::Identity(dim_in_, dim_in_));
}

// ---------------------------------------------------------------------------

ChoiMatrix::ChoiMatrix(int dim, Matrix data) : dim_(dim), data_(std::move(data)) {
  if (data_.rows() != dim * dim || data_.cols() != dim * dim)
    throw ConfigError("ChoiMatrix: data must be dim^2 x dim^2");
  const double herm = hermiticity_defect(data_);
  if (herm > tolerances().hermiticity) {
    std::ostringstream os;
    os << "ChoiMatrix: not Hermitian (defect " << herm << ")";
    throw InvariantError(os.str());
  }
}

Eigen::VectorXd ChoiMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (data_ + data_.adjoint()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double ChoiMatrix::min_eigenvalue() const { return eigenvalues().minCoeff(); }

double ChoiMatrix::trace_defect() const {
  return std::abs(data_.trace() - Complex(static_cast<double>(dim_)));
}

// ---------------------------------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator(kron(a.matrix(), b.matrix()));
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(kron(a.matrix(), b.matrix()));
}

Matrix swap_operator(int dim) {
  if (dim <= 0) throw ConfigError("swap_operator: dimension must be positive");
  Matrix s = Matrix::Zero(dim * dim, dim * dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) s(b * dim + a, a * dim + b) = 1.0;
  return s;
}

Matrix partial_trace(const Matrix& joint, std::span<const int> dims, std::span<const int> keep) {
  const int total = checked_total(dims);
  if (joint.rows() != total || joint.cols() != total)
    throw ConfigError("partial_trace: product of dims does not match the joint dimension");
  const auto kept = validated_slots(dims, keep);
  const auto traced = complement(static_cast<int>(dims.size()), kept);

  const auto kept_off = slot_offsets(dims, kept);
  const auto traced_off = slot_offsets(dims, traced);
  const auto n = static_cast<Eigen::Index>(kept_off.size());

  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      Complex acc = 0.0;
      for (int t : traced_off) acc += joint(kept_off[a] + t, kept_off[b] + t);
      out(a, b) = acc;
    }
  return out;
}

DensityOperator partial_trace(const DensityOperator& joint, std::span<const int> dims,
                              std::span<const int> keep) {
  return DensityOperator(partial_trace(joint.matrix(), dims, keep));
}

Matrix embed_operator(const Matrix& op, std::span<const int> dims, std::span<const int> slots) {
  const int total = checked_total(dims);
  validated_slots(dims, slots);
  std::vector<int> sorted(slots.begin(), slots.end());
  std::sort(sorted.begin(), sorted.end());
  const auto rest = complement(static_cast<int>(dims.size()), sorted);

  const auto op_off = slot_offsets(dims, slots);
  const auto rest_off = slot_offsets(dims, rest);
  if (op.rows() != static_cast<Eigen::Index>(op_off.size()) || op.cols() != op.rows())
    throw ConfigError("embed_operator: operator does not match the slot dimensions");

  Matrix full = Matrix::Zero(total, total);
  for (int r : rest_off)
    for (Eigen::Index x = 0; x < op.rows(); ++x)
      for (Eigen::Index y = 0; y < op.cols(); ++y) full(op_off[x] + r, op_off[y] + r) = op(x, y);
  return full;
}

Matrix conjugate_on_slots(const Matrix& state, const Matrix& op, std::span<const int> dims,
                          std::span<const int> slots) {
  const int total = checked_total(dims);
  if (state.rows() != total || state.cols() != total)
    throw ConfigError("conjugate_on_slots: state dimension mismatch");
  validated_slots(dims, slots);
  std::vector<int> sorted(slots.begin(), slots.end());
  std::sort(sorted.begin(), sorted.end());
  const auto rest = complement(static_cast<int>(dims.size()), sorted);

  const auto op_off = slot_offsets(dims, slots);
  const auto rest_off = slot_offsets(dims, rest);
  if (op.rows() != static_cast<Eigen::Index>(op_off.size()) || op.cols() != op.rows())
    throw ConfigError("conjugate_on_slots: operator does not match the slot dimensions");

  // Left multiplication acts on row blocks, right multiplication on column
  // blocks; each block is the set of indices sharing one `rest` multi-index.
  Matrix left(total, total);
  std::vector<int> idx(op_off.size());
  for (int r : rest_off) {
    for (std::size_t x = 0; x < op_off.size(); ++x) idx[x] = op_off[x] + r;
    left(idx, Eigen::all) = op * state(idx, Eigen::all);
  }
  Matrix out(total, total);
  const Matrix op_dag = op.adjoint();
  for (int r : rest_off) {
    for (std::size_t x = 0; x < op_off.size(); ++x) idx[x] = op_off[x] + r;
    out(Eigen::all, idx) = left(Eigen::all, idx) * op_dag;
  }
  return out;
}

Matrix apply_kraus(const KrausChannel& channel, const Matrix& rho) {
  if (rho.rows() != channel.dim_in() || rho.cols() != channel.dim_in())
    throw ConfigError("apply_channel: channel input dimension does not match the state");
  Matrix out = Matrix::Zero(channel.dim_out(), channel.dim_out());
  for (const auto& k : channel.operators()) out.noalias() += k * rho * k.adjoint();
  return out;
}

DensityOperator apply_channel(const KrausChannel& channel, const DensityOperator& rho) {
  return DensityOperator(apply_kraus(channel, rho.matrix()));
}

KrausChannel compose(const KrausChannel& a, const KrausChannel& b) {
  if (a.dim_in() != b.dim_out()) throw ConfigError("compose: dimension mismatch");
  std::vector<Matrix> ops;
  ops.reserve(a.operators().size() * b.operators().size());
  for (const auto& ka : a.operators())
    for (const auto& kb : b.operators()) ops.push_back(ka * kb);
  return KrausChannel(std::move(ops));
}

ChoiMatrix choi_of(const KrausChannel& channel) {
  if (channel.dim_in() != channel.dim_out()) throw ConfigError("choi_of: channel must be square");
  const int d = channel.dim_in();
  Matrix choi = Matrix::Zero(d * d, d * d);
  // Column-stacked Kraus operators: |K>> = sum_i |i> (x) K|i>.
  for (const auto& k : channel.operators()) {
    const Eigen::Map<const Vector> vec(k.data(), d * d);
    choi.noalias() += vec * vec.adjoint();
  }
  return ChoiMatrix(d, std::move(choi));
}

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
  return trace_distance(a.matrix(), b.matrix());
}

double trace_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ConfigError("trace_distance: dimension mismatch");
  const Matrix diff = a - b;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace nmc
