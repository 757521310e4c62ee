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

#include <stdexcept>
#include <string>

namespace nmc {

/// Invalid user-facing input: bad dimensions, out-of-range parameters,
/// malformed configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computed object violated one of its invariants (non-positive state,
/// non-trace-preserving channel, beta1^2 > beta2, ...). Always a bug or an
/// unsupported numerical regime; never clipped silently.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical divergence: non-finite quadrature sums, root-finding failure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The convolution series did not reach its tail tolerance within k_max.
class TruncationError : public NumericalError {
 public:
  TruncationError(const std::string& what, int terms, double residual)
      : NumericalError(what), terms_(terms), residual_(residual) {}

  int terms() const noexcept { return terms_; }
  double residual() const noexcept { return residual_; }

 private:
  int terms_;
  double residual_;
};

}  // namespace nmc
