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

#include "nmcollide/laplace.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nmcollide/errors.hpp"

namespace nmc {

namespace {

struct TalbotNode {
  ComplexLD s;       // contour point
  ComplexLD weight;  // ds/dtheta factor (1 + i sigma), real part of the derivative absorbed
};

void check_arguments(double t, int n_nodes) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("inverse_laplace: t must be finite and > 0");
  if (n_nodes < 2) throw ConfigError("inverse_laplace: need at least 2 nodes");
}

TalbotNode node(long double r, int k, int n_nodes) {
  const long double theta = k * std::numbers::pi_v<long double> / n_nodes;
  const long double cot = std::cos(theta) / std::sin(theta);
  const long double sigma = theta + (theta * cot - 1.0L) * cot;
  return {ComplexLD(r * theta * cot, r * theta), ComplexLD(1.0L, sigma)};
}

[[noreturn]] void diverged(double t, int n_nodes, long double r) {
  std::ostringstream os;
  os << "inverse_laplace: non-finite quadrature sum (t=" << t << ", nodes=" << n_nodes
     << ", contour radius r=" << static_cast<double>(r) << ")";
  throw NumericalError(os.str());
}

}  // namespace

double inverse_laplace(const LaplaceFunction& transform, double t, int n_nodes) {
  check_arguments(t, n_nodes);
  const long double tl = t;
  const long double r = 2.0L * n_nodes / (5.0L * tl);

  long double acc = 0.5L * (transform(ComplexLD(r, 0.0L)) * std::exp(r * tl)).real();
  for (int k = 1; k < n_nodes; ++k) {
    const auto [s, weight] = node(r, k, n_nodes);
    acc += (std::exp(tl * s) * transform(s) * weight).real();
  }
  const long double value = r / n_nodes * acc;
  if (!std::isfinite(value)) diverged(t, n_nodes, r);
  return static_cast<double>(value);
}

MatrixLD inverse_laplace_matrix(const MatrixLaplaceFunction& transform, double t, int n_nodes) {
  check_arguments(t, n_nodes);
  const long double tl = t;
  const long double r = 2.0L * n_nodes / (5.0L * tl);

  // Complex-valued originals: the theta and -theta nodes are not conjugate
  // partners, so both halves of the contour are summed explicitly.
  MatrixLD acc = transform(ComplexLD(r, 0.0L)) * ComplexLD(std::exp(r * tl));
  for (int k = 1; k < n_nodes; ++k) {
    const auto [s, weight] = node(r, k, n_nodes);
    acc += transform(s) * (std::exp(tl * s) * weight);
    acc += transform(std::conj(s)) * (std::exp(tl * std::conj(s)) * std::conj(weight));
  }
  acc *= ComplexLD(r / (2.0L * n_nodes));
  if (!acc.allFinite()) diverged(t, n_nodes, r);
  return acc;
}

}  // namespace nmc
