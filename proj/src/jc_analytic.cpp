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

#include "nmcollide/jc_analytic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nmcollide/errors.hpp"
#include "nmcollide/tolerance.hpp"

namespace nmc {

namespace {

void check_point(double tau, double gamma_bar) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be finite and >= 0");
  if (!(gamma_bar >= 0.0) || !std::isfinite(gamma_bar)) throw ConfigError("gamma_bar must be finite and >= 0");
}

Complex cubic(Complex u, double g) { return ((u - g) * u + 4.0) * u - 2.0 * g; }
Complex cubic_slope(Complex u, double g) { return (3.0 * u - 2.0 * g) * u + 4.0; }

Complex newton_polish(Complex u, double g) {
  for (int it = 0; it < 4; ++it) {
    const Complex slope = cubic_slope(u, g);
    if (slope == 0.0) break;
    u -= cubic(u, g) / slope;
  }
  return u;
}

// The real root lies in [0, g]: P(0) = -2g <= 0 <= 2g = P(g).
double real_root(double g) {
  if (g == 0.0) return 0.0;
  double lo = 0.0, hi = g;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (cubic(mid, g).real() < 0.0 ? lo : hi) = mid;
  }
  return newton_polish(0.5 * (lo + hi), g).real();
}

double discriminant_delta(double g) { return std::sqrt(6.0 * g * g * g * g - 39.0 * g * g + 192.0); }

}  // namespace

HermitianOperator jc_coupling(double omega) {
  if (!std::isfinite(omega)) throw ConfigError("coupling rate must be finite");
  Matrix raise = Matrix::Zero(2, 2);
  raise(1, 0) = 1.0;
  const Matrix lower = raise.adjoint();
  return HermitianOperator(omega * (kron(raise, lower) + kron(lower, raise)));
}

KrausChannel adc_channel(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("adc_channel: eta must lie in [0, 1]");
  Matrix k0 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = eta;
  Matrix k1 = Matrix::Zero(2, 2);
  k1(0, 1) = std::sqrt(1.0 - eta * eta);
  return KrausChannel({k0, k1});
}

double beta1(double tau, double gamma_bar) {
  check_point(tau, gamma_bar);
  const double g = gamma_bar;
  const double q = 0.25 * (g * g - 4.0);  // squared half-frequency; sign picks the branch
  const double x = q * tau * tau;
  const double decay = std::exp(-0.5 * g * tau);

  if (std::abs(x) < 1e-3) {
    // Near g = 2 both branches are analytic in q; use their shared series.
    const double c = 1.0 + x / 2.0 + x * x / 24.0 + x * x * x / 720.0 + x * x * x * x / 40320.0;
    const double s = tau * (1.0 + x / 6.0 + x * x / 120.0 + x * x * x / 5040.0 + x * x * x * x / 362880.0);
    return decay * (0.5 * g * s + c);
  }
  if (q < 0.0) {
    const double w = std::sqrt(-q);
    return decay * (0.5 * g * std::sin(w * tau) / w + std::cos(w * tau));
  }
  // g > 2: fold the prefactor into the exponentials; w - g/2 = -1/(w + g/2).
  const double w = std::sqrt(q);
  const double slow = std::exp(-tau / (w + 0.5 * g));
  const double fast = std::exp(-(w + 0.5 * g) * tau);
  return 0.5 * (slow + fast) + 0.25 * g * (slow - fast) / w;
}

Complex CubicSpectrum::evaluate(double tau) const {
  Complex sum = 0.0;
  for (int i = 0; i < 3; ++i) sum += amplitude[i] * std::exp(alpha[i] * tau);
  return sum;
}

CubicSpectrum cubic_spectrum(double gamma_bar) {
  check_point(0.0, gamma_bar);
  const double g = gamma_bar;
  const double r = real_root(g);

  // Deflate: P(u) = (u - r)(u^2 + b u + c).
  const double b = r - g;
  const double c = 4.0 + r * b;
  const Complex root_disc = std::sqrt(Complex(b * b - 4.0 * c, 0.0));
  Complex upper = newton_polish(0.5 * (-b + root_disc), g);
  if (upper.imag() < 0.0) upper = std::conj(upper);

  const std::array<Complex, 3> u{Complex(r, 0.0), upper, std::conj(upper)};
  CubicSpectrum spec{};
  spec.delta = discriminant_delta(g);
  for (int i = 0; i < 3; ++i) {
    const Complex slope = cubic_slope(u[i], g);
    if (std::abs(slope) < 1e-14) {
      std::ostringstream os;
      os << "cubic_spectrum: repeated pole at gamma_bar=" << g;
      throw NumericalError(os.str());
    }
    spec.alpha[i] = u[i] - g;
    spec.amplitude[i] = (u[i] * u[i] + 2.0) / slope;
  }
  return spec;
}

CubicSpectrum radical_cubic_spectrum(double gamma_bar) {
  check_point(0.0, gamma_bar);
  const double g = gamma_bar;
  const double sqrt3 = std::numbers::sqrt3;
  const Complex i(0.0, 1.0);

  CubicSpectrum spec{};
  spec.delta = discriminant_delta(g);
  const double root = std::cbrt(g * g * g + 3.0 * spec.delta + 9.0 * g);

  const double a1 = ((g - root) * (g - root) - 12.0) / (3.0 * root);
  const Complex a2 = (i * (sqrt3 + i) * root - (1.0 + i * sqrt3) * (g * g - 12.0) / root - 4.0 * g) / 6.0;

  const double amp1 = (2.0 * g * a1 + a1 * a1 + g * g + 2.0) / (a1 * a1 + std::norm(a2) - 2.0 * a1 * a2.real());
  const Complex amp2 = i * (2.0 * g * a2 + a2 * a2 + g * g + 2.0) / (2.0 * (a1 - a2) * a2.imag());

  spec.alpha = {Complex(a1, 0.0), a2, std::conj(a2)};
  spec.amplitude = {Complex(amp1, 0.0), amp2, std::conj(amp2)};
  return spec;
}

double beta2(double tau, double gamma_bar) {
  check_point(tau, gamma_bar);
  const Complex value = cubic_spectrum(gamma_bar).evaluate(tau);
  if (std::abs(value.imag()) > tolerances().beta_imaginary) {
    std::ostringstream os;
    os << "beta2: imaginary residue " << value.imag() << " at tau=" << tau << ", gamma_bar=" << gamma_bar;
    throw InvariantError(os.str());
  }
  return value.real();
}

BetaPair beta_pair(double tau, double gamma_bar) {
  BetaPair pair{tau, gamma_bar, beta1(tau, gamma_bar), beta2(tau, gamma_bar)};
  const double tol = tolerances().beta_bound;
  if (pair.beta2 < -tol || pair.beta2 > 1.0 + tol || pair.beta1 * pair.beta1 > pair.beta2 + tol) {
    std::ostringstream os;
    os.precision(17);
    os << "beta pair violates 0 <= beta2 <= 1, beta1^2 <= beta2: beta1=" << pair.beta1 << " beta2=" << pair.beta2
       << " (tau=" << tau << ", gamma_bar=" << gamma_bar << ")";
    throw InvariantError(os.str());
  }
  return pair;
}

void QubitStateParams::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("qubit state: p must lie in [0, 1]");
  if (std::norm(r) > p * (1.0 - p) + tolerances().positivity)
    throw ConfigError("qubit state: |r|^2 must not exceed p(1-p)");
}

DensityOperator QubitStateParams::density() const {
  validate();
  return DensityOperator::qubit(p, r);
}

DensityOperator lambda_jc(double tau, double gamma_bar, const QubitStateParams& rho0) {
  rho0.validate();
  const BetaPair b = beta_pair(tau, gamma_bar);
  Matrix m(2, 2);
  m << 1.0 - b.beta2 * rho0.p, b.beta1 * rho0.r, b.beta1 * std::conj(rho0.r), b.beta2 * rho0.p;
  return DensityOperator(std::move(m));
}

Superoperator beta_map_superop(double beta1_value, double beta2_value) {
  // Column i + 2j holds vec(Phi(|i><j|)); row a + 2b is the (a, b) entry.
  Matrix s = Matrix::Zero(4, 4);
  s(0, 0) = 1.0;
  s(0, 3) = 1.0 - beta2_value;
  s(3, 3) = beta2_value;
  s(2, 2) = beta1_value;
  s(1, 1) = beta1_value;
  return Superoperator(2, std::move(s));
}

KrausChannel lambda_jc_channel(double tau, double gamma_bar) {
  const BetaPair b = beta_pair(tau, gamma_bar);
  return beta_map_superop(b.beta1, b.beta2).to_kraus();
}

KrausChannel beta_kraus_closed_form(double beta1_value, double beta2_value) {
  const double tol = tolerances().beta_bound;
  if (beta1_value * beta1_value > beta2_value + tol || beta2_value < -tol || beta2_value > 1.0 + tol)
    throw InvariantError("beta_kraus_closed_form: (beta1, beta2) outside the CPT region");
  Matrix k0 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = beta1_value;
  Matrix k1 = Matrix::Zero(2, 2);
  k1(1, 1) = std::sqrt(std::max(0.0, beta2_value - beta1_value * beta1_value));
  Matrix k2 = Matrix::Zero(2, 2);
  k2(0, 1) = std::sqrt(std::max(0.0, 1.0 - beta2_value));
  return KrausChannel({k0, k1, k2});
}

}  // namespace nmc
