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

#include "nmcollide/convolution.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

#include "nmcollide/errors.hpp"

namespace nmc {

SuperopGrid::SuperopGrid(int dim, int n_points)
    : dim_(dim), n_points_(n_points), data_(static_cast<std::size_t>(dim) * dim * dim * dim * n_points) {
  if (dim <= 0 || n_points <= 0) throw ConfigError("SuperopGrid: dim and n_points must be positive");
}

Eigen::Map<Matrix> SuperopGrid::operator[](int j) {
  const int b = block();
  return Eigen::Map<Matrix>(data_.data() + static_cast<std::size_t>(j) * b * b, b, b);
}

Eigen::Map<const Matrix> SuperopGrid::operator[](int j) const {
  const int b = block();
  return Eigen::Map<const Matrix>(data_.data() + static_cast<std::size_t>(j) * b * b, b, b);
}

double SuperopGrid::sup_norm() const {
  double worst = 0.0;
  for (int j = 0; j < n_points_; ++j) worst = std::max(worst, (*this)[j].norm());
  return worst;
}

void SuperopGrid::set_zero() { std::fill(data_.begin(), data_.end(), Complex(0.0)); }

void SuperopGrid::add_scaled(const SuperopGrid& other, double scale) {
  if (other.dim_ != dim_ || other.n_points_ != n_points_) throw ConfigError("SuperopGrid: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += scale * other.data_[i];
}

namespace {

void check_shapes(const SuperopGrid& a, const SuperopGrid& b, const SuperopGrid& out) {
  if (a.dim() != b.dim() || a.dim() != out.dim() || a.size() != b.size() || a.size() != out.size())
    throw ConfigError("convolve: grid shapes differ");
}

// Leading weights of the rule on [0, j dt]; the same weights apply mirrored
// at the far end, everything in between has weight 1.
struct HeadWeights {
  int count;
  double w[3];
};

HeadWeights head_weights(int j, Quadrature rule) {
  if (rule == Quadrature::trapezoid || j == 1) return {1, {0.5, 0.0, 0.0}};
  switch (j) {
    case 2: return {2, {1.0 / 3.0, 4.0 / 3.0, 0.0}};                   // Simpson
    case 3: return {2, {3.0 / 8.0, 9.0 / 8.0, 0.0}};                   // Simpson 3/8
    case 4: return {3, {14.0 / 45.0, 64.0 / 45.0, 24.0 / 45.0}};       // Boole
    default: return {3, {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0}};          // Gregory
  }
}

// One output sample. Fixed-size blocks let Eigen unroll the 4x4 (qubit)
// products, which dominate every run in practice; the serial reference
// always takes the dynamic-size path.
template <int B>
void convolve_point(const Complex* a, const Complex* b, Complex* out, int j, int block, double dt, Quadrature rule) {
  using Block = Eigen::Matrix<Complex, B, B>;
  using ConstMap = Eigen::Map<const Block>;
  const std::size_t stride = static_cast<std::size_t>(block) * block;
  auto at = [&](const Complex* base, int k) { return ConstMap(base + k * stride, block, block); };

  Block acc = Block::Zero(block, block);
  if (j > 0) {
    const HeadWeights head = head_weights(j, rule);
    for (int m = 0; m < head.count; ++m) {
      acc.noalias() += head.w[m] * (at(a, m) * at(b, j - m));
      if (j - m != m) acc.noalias() += head.w[m] * (at(a, j - m) * at(b, m));
    }
    for (int m = head.count; m <= j - head.count; ++m) acc.noalias() += at(a, m) * at(b, j - m);
  }
  Eigen::Map<Block>(out + j * stride, block, block) = dt * acc;
}

using PointKernel = void (*)(const Complex*, const Complex*, Complex*, int, int, double, Quadrature);

PointKernel select_kernel(int block) {
  switch (block) {
    case 4: return convolve_point<4>;
    case 9: return convolve_point<9>;
    default: return convolve_point<Eigen::Dynamic>;
  }
}

}  // namespace

int kernel_threads() {
  int threads = omp_get_max_threads();
  if (const char* env = std::getenv("NMCOLLIDE_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) threads = std::min(threads, cap);
    } catch (const std::exception&) {
      // unparseable values leave the OpenMP default in place
    }
  }
  return std::max(threads, 1);
}

std::vector<double> quadrature_weights(int j, Quadrature rule) {
  if (j < 0) throw ConfigError("quadrature_weights: j must be >= 0");
  std::vector<double> w(j + 1, j == 0 ? 0.0 : 1.0);
  if (j == 0) return w;
  const HeadWeights head = head_weights(j, rule);
  for (int m = 0; m < head.count; ++m) w[m] = w[j - m] = head.w[m];
  return w;
}

void convolve_serial(const SuperopGrid& a, const SuperopGrid& b, double dt, SuperopGrid& out, Quadrature rule) {
  check_shapes(a, b, out);
  Complex* dst = out.data();
  for (int j = 0; j < a.size(); ++j) convolve_point<Eigen::Dynamic>(a.data(), b.data(), dst, j, a.block(), dt, rule);
}

void convolve_parallel(const SuperopGrid& a, const SuperopGrid& b, double dt, SuperopGrid& out, Quadrature rule) {
  check_shapes(a, b, out);
  const PointKernel kernel = select_kernel(a.block());
  Complex* dst = out.data();
  const int n = a.size();
  const int block = a.block();
  // Work per sample grows linearly with j; dynamic chunks keep threads even.
#pragma omp parallel for schedule(dynamic, 32) num_threads(kernel_threads())
  for (int j = 0; j < n; ++j) kernel(a.data(), b.data(), dst, j, block, dt, rule);
}

}  // namespace nmc
