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

// Closed-form dynamical map for a qubit coupled to qubit-like ancillas by a
// resonant exchange (Jaynes-Cummings) interaction H = Omega (s+ a- + s- a+).
//
// With the ancillas starting in |0>, the memory kernel is the amplitude
// damping channel A(cos tau), tau = Omega t, and the dynamical map is
//
//   Lambda(tau) rho = [[1 - beta2 p, beta1 r], [beta1 r*, beta2 p]]
//
// for rho = [[1 - p, r], [r*, p]], where beta_l has Laplace transform
// c_l(s + g) / (1 - g c_l(s + g)), c_l = L[cos^l], g = Gamma / Omega.

#pragma once

#include <array>
#include <complex>

#include "nmcollide/quantum_core.hpp"
#include "nmcollide/superoperator.hpp"

namespace nmc {

/// Omega (s+ (x) a- + s- (x) a+) on system (x) ancilla, |1> the excited level.
HermitianOperator jc_coupling(double omega = 1.0);

/// Amplitude damping: K0 = diag(1, eta), K1 = sqrt(1 - eta^2) |0><1|.
/// Requires 0 <= eta <= 1.
KrausChannel adc_channel(double eta);

double beta1(double tau, double gamma_bar);
double beta2(double tau, double gamma_bar);

struct BetaPair {
  double tau;
  double gamma_bar;
  double beta1;
  double beta2;
};

/// Both functions at one point; throws InvariantError if the pair violates
/// 0 <= beta2 <= 1 or beta1^2 <= beta2 beyond the beta_bound tolerance.
BetaPair beta_pair(double tau, double gamma_bar);

/// beta2(tau) = sum_i amplitude_i e^{alpha_i tau}. alpha[0] is the real
/// pole, alpha[1] the pole with positive imaginary part, alpha[2] = alpha[1]*.
struct CubicSpectrum {
  std::array<Complex, 3> alpha;
  std::array<Complex, 3> amplitude;
  double delta;

  Complex evaluate(double tau) const;
};

/// Partial fractions over the roots of u^3 - g u^2 + 4u - 2g (u = s + g).
/// This is the route beta2() uses.
CubicSpectrum cubic_spectrum(double gamma_bar);

/// The same spectrum from the explicit radical formulas (cube root of
/// g^3 + 3 delta + 9 g, delta = sqrt(6 g^4 - 39 g^2 + 192)). Cross-check only.
CubicSpectrum radical_cubic_spectrum(double gamma_bar);

struct QubitStateParams {
  double p = 0.0;
  Complex r = 0.0;

  void validate() const;
  DensityOperator density() const;
};

DensityOperator lambda_jc(double tau, double gamma_bar, const QubitStateParams& rho0);

/// Superoperator of the (beta1, beta2) map, no validation. Also used to
/// build deliberately broken maps for certifier negative controls.
Superoperator beta_map_superop(double beta1, double beta2);

/// Kraus form obtained from the Choi eigendecomposition of the beta map.
KrausChannel lambda_jc_channel(double tau, double gamma_bar);

/// {diag(1, beta1), sqrt(beta2 - beta1^2) |1><1|, sqrt(1 - beta2) |0><1|}.
KrausChannel beta_kraus_closed_form(double beta1, double beta2);

}  // namespace nmc
