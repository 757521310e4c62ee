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

#include "nmcollide/superoperator.hpp"

#include <cmath>
#include <sstream>

#include "nmcollide/errors.hpp"
#include "nmcollide/tolerance.hpp"

namespace nmc {

Matrix superop_to_choi(const Matrix& superop, int dim) {
  const int d = dim;
  Matrix choi(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) choi(i * d + a, j * d + b) = superop(a + b * d, i + j * d);
  return choi;
}

Matrix choi_to_superop(const Matrix& choi, int dim) {
  const int d = dim;
  Matrix superop(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) superop(a + b * d, i + j * d) = choi(i * d + a, j * d + b);
  return superop;
}

Superoperator::Superoperator(int dim, Matrix data) : dim_(dim), data_(std::move(data)) {
  if (dim_ <= 0 || data_.rows() != dim_ * dim_ || data_.cols() != dim_ * dim_)
    throw ConfigError("Superoperator: data must be dim^2 x dim^2");
}

Superoperator Superoperator::identity(int dim) {
  return Superoperator(dim, Matrix::Identity(dim * dim, dim * dim));
}

Superoperator Superoperator::zero(int dim) {
  return Superoperator(dim, Matrix::Zero(dim * dim, dim * dim));
}

Superoperator Superoperator::from_kraus(const KrausChannel& channel) {
  if (channel.dim_in() != channel.dim_out())
    throw ConfigError("Superoperator::from_kraus: channel must be square");
  const int d = channel.dim_in();
  Matrix s = Matrix::Zero(d * d, d * d);
  for (const auto& k : channel.operators()) s.noalias() += kron(k.conjugate(), k);
  return Superoperator(d, std::move(s));
}

Matrix Superoperator::apply(const Matrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_)
    throw ConfigError("Superoperator::apply: state dimension mismatch");
  const Eigen::Map<const Vector> in(rho.data(), dim_ * dim_);
  const Vector out = data_ * in;
  return Eigen::Map<const Matrix>(out.data(), dim_, dim_);
}

DensityOperator Superoperator::apply(const DensityOperator& rho) const {
  return DensityOperator(apply(rho.matrix()));
}

Superoperator Superoperator::then_after(const Superoperator& other) const {
  if (other.dim_ != dim_) throw ConfigError("Superoperator composition: dimension mismatch");
  return Superoperator(dim_, data_ * other.data_);
}

ChoiMatrix Superoperator::choi() const { return ChoiMatrix(dim_, superop_to_choi(data_, dim_)); }

double Superoperator::trace_defect() const {
  const int d = dim_;
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Complex tr = 0.0;
      for (int a = 0; a < d; ++a) tr += data_(a + a * d, i + j * d);
      worst = std::max(worst, std::abs(tr - Complex(i == j ? 1.0 : 0.0)));
    }
  return worst;
}

KrausChannel Superoperator::to_kraus() const {
  const int d = dim_;
  const Matrix c = superop_to_choi(data_, d);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (c + c.adjoint()));
  const auto& values = solver.eigenvalues();
  if (values.minCoeff() < -tolerances().choi_positivity) {
    std::ostringstream os;
    os << "Superoperator::to_kraus: map is not completely positive (Choi eigenvalue "
       << values.minCoeff() << ")";
    throw InvariantError(os.str());
  }
  const double cutoff = 1e-15 * std::max(1.0, values.cwiseAbs().maxCoeff());
  std::vector<Matrix> ops;
  for (int k = 0; k < values.size(); ++k) {
    if (values(k) <= cutoff) continue;
    const Vector v = std::sqrt(values(k)) * solver.eigenvectors().col(k);
    ops.emplace_back(Eigen::Map<const Matrix>(v.data(), d, d));
  }
  if (ops.empty()) ops.push_back(Matrix::Zero(d, d));
  return KrausChannel(std::move(ops));
}

Superoperator Superoperator::operator+(const Superoperator& other) const {
  if (other.dim_ != dim_) throw ConfigError("Superoperator sum: dimension mismatch");
  return Superoperator(dim_, data_ + other.data_);
}

Superoperator Superoperator::operator-(const Superoperator& other) const {
  if (other.dim_ != dim_) throw ConfigError("Superoperator difference: dimension mismatch");
  return Superoperator(dim_, data_ - other.data_);
}

Superoperator Superoperator::operator*(double scale) const {
  return Superoperator(dim_, data_ * scale);
}

}  // namespace nmc
