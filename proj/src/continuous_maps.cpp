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

#include "nmcollide/continuous_maps.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "nmcollide/collision_engine.hpp"
#include "nmcollide/errors.hpp"
#include "nmcollide/parallel.hpp"

namespace nmc {

Matrix KernelSpectrum::at(double t) const {
  Matrix out = Matrix::Zero(coefficients.front().rows(), coefficients.front().cols());
  for (std::size_t k = 0; k < frequencies.size(); ++k)
    out += coefficients[k] * std::exp(Complex(0.0, frequencies[k] * t));
  return out;
}

MatrixLD KernelSpectrum::laplace(ComplexLD s) const {
  const auto n = coefficients.front().rows();
  MatrixLD out = MatrixLD::Zero(n, n);
  for (std::size_t k = 0; k < frequencies.size(); ++k) {
    const ComplexLD pole(0.0L, static_cast<long double>(frequencies[k]));
    out += coefficients[k].cast<ComplexLD>() / (s - pole);
  }
  return out;
}

MemoryKernelMap::MemoryKernelMap(Builder builder, int system_dim, int ancilla_dim, std::string description,
                                 std::optional<KernelSpectrum> spectrum)
    : builder_(std::move(builder)),
      system_dim_(system_dim),
      ancilla_dim_(ancilla_dim),
      description_(std::move(description)),
      spectrum_(std::move(spectrum)) {
  if (!builder_) throw ConfigError("MemoryKernelMap: empty builder");
  if (system_dim_ <= 0 || ancilla_dim_ <= 0) throw ConfigError("MemoryKernelMap: dims must be positive");
}

TimeGrid TimeGrid::with_step(double t_max, double dt) {
  if (!(dt > 0.0) || !(t_max > 0.0)) throw ConfigError("TimeGrid: t_max and dt must be > 0");
  const double steps = std::round(t_max / dt);
  if (std::abs(steps * dt - t_max) > 1e-9 * t_max) throw ConfigError("TimeGrid: dt must divide t_max");
  return {t_max, static_cast<int>(steps) + 1};
}

void TimeGrid::validate() const {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("TimeGrid: t_max must be finite and > 0");
  if (n_points < 2) throw ConfigError("TimeGrid: n_points must be >= 2");
}

void SeriesPolicy::validate() const {
  if (k_max < 1) throw ConfigError("SeriesPolicy: k_max must be >= 1");
  if (!(tail_tol > 0.0)) throw ConfigError("SeriesPolicy: tail_tol must be > 0");
}

namespace {

struct WeightedInput {
  int index;
  double weight;
};

// Kraus operators sqrt(w) <nu| U |input> on the system factor.
std::vector<Matrix> kernel_kraus(const Matrix& u, int ds, int da, const std::vector<WeightedInput>& inputs) {
  std::vector<Matrix> ops;
  ops.reserve(inputs.size() * da);
  for (const auto& in : inputs) {
    const double amp = std::sqrt(in.weight);
    for (int nu = 0; nu < da; ++nu) {
      Matrix k(ds, ds);
      for (int out = 0; out < ds; ++out)
        for (int src = 0; src < ds; ++src) k(out, src) = amp * u(out * da + nu, src * da + in.index);
      ops.push_back(std::move(k));
    }
  }
  return ops;
}

KernelSpectrum kernel_spectrum(const HermitianOperator& h, int ds, int da, const std::vector<WeightedInput>& inputs) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  const auto& values = solver.eigenvalues();
  const Matrix& vectors = solver.eigenvectors();
  const int n = static_cast<int>(values.size());

  // Per eigenvector a, the Kraus components X_{a,nu,k} = <., nu| P_a |., k>.
  std::vector<std::vector<Matrix>> parts(n);
  for (int a = 0; a < n; ++a) {
    const Matrix projector = vectors.col(a) * vectors.col(a).adjoint();
    parts[a] = kernel_kraus(projector, ds, da, inputs);
  }

  KernelSpectrum spectrum;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Matrix c = Matrix::Zero(ds * ds, ds * ds);
      for (std::size_t m = 0; m < parts[a].size(); ++m) c += kron(parts[a][m].conjugate(), parts[b][m]);
      if (max_abs(c) == 0.0) continue;
      const double freq = values(a) - values(b);
      bool merged = false;
      for (std::size_t k = 0; k < spectrum.frequencies.size(); ++k)
        if (std::abs(spectrum.frequencies[k] - freq) <= 1e-13 * (1.0 + std::abs(freq))) {
          spectrum.coefficients[k] += c;
          merged = true;
          break;
        }
      if (!merged) {
        spectrum.frequencies.push_back(freq);
        spectrum.coefficients.push_back(std::move(c));
      }
    }
  if (spectrum.frequencies.empty()) {
    spectrum.frequencies.push_back(0.0);
    spectrum.coefficients.push_back(Matrix::Zero(ds * ds, ds * ds));
  }
  return spectrum;
}

MemoryKernelMap make_kernel(const HermitianOperator& h, int ds, int da, std::vector<WeightedInput> inputs,
                            std::string description) {
  if (ds <= 0 || da <= 0 || h.dim() != ds * da) throw ConfigError("kernel map: hamiltonian does not match dims");
  auto spectrum = kernel_spectrum(h, ds, da, inputs);
  auto builder = [h, ds, da, inputs](double t) {
    return KrausChannel(kernel_kraus(h.propagator(t), ds, da, inputs));
  };
  return MemoryKernelMap(std::move(builder), ds, da, std::move(description), std::move(spectrum));
}

}  // namespace

MemoryKernelMap build_kernel_map(const HermitianOperator& hamiltonian, int system_dim, int ancilla_dim,
                                 int ancilla_init) {
  if (ancilla_init < 0 || ancilla_init >= ancilla_dim) throw ConfigError("ancilla_init out of range");
  std::ostringstream desc;
  desc << "pure ancilla |" << ancilla_init << ">, dims " << system_dim << "x" << ancilla_dim;
  return make_kernel(hamiltonian, system_dim, ancilla_dim, {{ancilla_init, 1.0}}, desc.str());
}

MemoryKernelMap build_thermal_kernel_map(const HermitianOperator& hamiltonian, int system_dim, int ancilla_dim,
                                         const std::vector<double>& weights) {
  if (static_cast<int>(weights.size()) != ancilla_dim)
    throw ConfigError("thermal kernel: need one weight per ancilla level");
  const BathSpec checked = BathSpec::from_weights(weights);
  std::vector<WeightedInput> inputs;
  for (int k = 0; k < ancilla_dim; ++k)
    if (checked.weights()[k] > 0.0) inputs.push_back({k, checked.weights()[k]});
  std::ostringstream desc;
  desc << "thermal ancilla mixture, dims " << system_dim << "x" << ancilla_dim;
  return make_kernel(hamiltonian, system_dim, ancilla_dim, std::move(inputs), desc.str());
}

MemoryKernelMap build_thermal_kernel_map(const HermitianOperator& hamiltonian, int system_dim, int ancilla_dim,
                                         const std::vector<double>& energies, double inverse_temperature) {
  if (static_cast<int>(energies.size()) != ancilla_dim)
    throw ConfigError("thermal kernel: need one energy per ancilla level");
  return build_thermal_kernel_map(hamiltonian, system_dim, ancilla_dim,
                                  thermal_weights(energies, inverse_temperature));
}

SuperopGrid sample_kernel(const MemoryKernelMap& kernel, const TimeGrid& grid) {
  grid.validate();
  SuperopGrid samples(kernel.system_dim(), grid.n_points);
  parallel_for(grid.n_points, [&](int j) { samples[j] = kernel.superop(grid.at(j)).matrix(); });
  return samples;
}

SeriesResult lambda_series(const MemoryKernelMap& kernel, double gamma, const TimeGrid& grid,
                           const SeriesPolicy& policy, const SeriesObserver& observer) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("lambda_series: Gamma must be finite and >= 0");
  grid.validate();
  policy.validate();

  SuperopGrid first = sample_kernel(kernel, grid);
  for (int j = 0; j < grid.n_points; ++j) first[j] *= std::exp(-gamma * grid.at(j));

  SeriesResult result;
  result.grid = grid;
  SuperopGrid sum = first;
  result.terms = 1;
  result.term_norms.push_back(first.sup_norm());
  if (observer) observer(1, sum);

  bool converged = gamma == 0.0;  // every higher term carries a factor Gamma
  double last_norm = converged ? 0.0 : result.term_norms.back();
  if (!converged && last_norm <= policy.tail_tol) converged = true;

  SuperopGrid term = first;
  SuperopGrid next(first.dim(), grid.n_points);
  const double dt = grid.dt();
  for (int k = 2; !converged && k <= policy.k_max; ++k) {
    if (policy.parallel)
      convolve_parallel(first, term, dt, next, policy.quadrature);
    else
      convolve_serial(first, term, dt, next, policy.quadrature);
    std::swap(term, next);
    for (int j = 0; j < grid.n_points; ++j) term[j] *= gamma;

    last_norm = term.sup_norm();
    sum.add_scaled(term, 1.0);
    result.terms = k;
    result.term_norms.push_back(last_norm);
    if (observer) observer(k, sum);
    converged = last_norm <= policy.tail_tol;
  }
  result.residual = last_norm;
  if (!converged) {
    std::ostringstream os;
    os << "lambda_series: tail " << last_norm << " above tolerance " << policy.tail_tol << " after "
       << policy.k_max << " terms (Gamma=" << gamma << ", t_max=" << grid.t_max << ")";
    throw TruncationError(os.str(), result.terms, last_norm);
  }

  result.maps.reserve(grid.n_points);
  for (int j = 0; j < grid.n_points; ++j) result.maps.emplace_back(kernel.system_dim(), Matrix(sum[j]));
  return result;
}

std::vector<Superoperator> lambda_resolvent(const MemoryKernelMap& kernel, double gamma,
                                            const std::vector<double>& times, int n_nodes) {
  if (!kernel.spectrum()) throw ConfigError("lambda_resolvent: kernel has no spectral form");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("lambda_resolvent: Gamma must be finite and >= 0");
  const KernelSpectrum& spectrum = *kernel.spectrum();
  const int d = kernel.system_dim();
  const long double g = gamma;
  const MatrixLD identity = MatrixLD::Identity(d * d, d * d);

  auto transform = [&](ComplexLD s) -> MatrixLD {
    const MatrixLD e = spectrum.laplace(s + g);
    const MatrixLD denom = identity - g * e;
    return denom.partialPivLu().solve(e);  // e and denom commute
  };

  std::vector<Superoperator> maps(times.size(), Superoperator::identity(d));
  parallel_for(static_cast<int>(times.size()), [&](int i) {
    if (times[i] < 0.0) throw ConfigError("lambda_resolvent: times must be >= 0");
    if (times[i] == 0.0) return;
    maps[i] = Superoperator(d, inverse_laplace_matrix(transform, times[i], n_nodes).cast<Complex>());
  });
  return maps;
}

Superoperator LindbladLimit::propagate(double t) const {
  const Matrix g = generator.matrix() * t;
  return Superoperator(generator.dim(), g.exp());
}

LindbladLimit lindblad_limit(const MemoryKernelMap& kernel, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("lindblad_limit: h must be > 0");
  const int d = kernel.system_dim();
  const Matrix id = Matrix::Identity(d * d, d * d);
  const Matrix e1 = kernel.superop(h).matrix();
  const Matrix e2 = kernel.superop(2.0 * h).matrix();
  return {h, Superoperator(d, (e1 - id) / h), Superoperator(d, (-3.0 * id + 4.0 * e1 - e2) / (2.0 * h))};
}

}  // namespace nmc
