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

namespace nmc {

/// Every numerical threshold used to validate states, channels and maps.
/// One process-wide profile; override it at start-up (the CLI does so from
/// the config's "tolerances" block) and never while computations run.
struct ToleranceProfile {
  double hermiticity = 1e-12;         // max |rho - rho^dagger| element
  double unit_trace = 1e-12;          // |Tr rho - 1|
  double positivity = 1e-10;          // min eigenvalue >= -positivity
  double kraus_completeness = 1e-10;  // |sum K^dagger K - 1| elementwise
  double choi_trace = 1e-10;          // |Tr Choi - d|
  double choi_positivity = 1e-10;     // Choi min eigenvalue >= -this
  double series_positivity = 1e-8;    // CP tolerance for quadrature maps
  double series_trace = 1e-8;         // TP tolerance for quadrature maps
  double beta_bound = 1e-9;           // 0 <= beta2 <= 1 + tol, beta1^2 <= beta2 + tol
  double beta_imaginary = 1e-10;      // allowed imaginary residue of beta2
};

const ToleranceProfile& tolerances();
void set_tolerances(const ToleranceProfile& profile);

}  // namespace nmc
