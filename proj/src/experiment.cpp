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

#include "nmcollide/experiment.hpp"

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "nmcollide/errors.hpp"
#include "nmcollide/parallel.hpp"
#include "nmcollide/verify.hpp"

namespace nmc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- parsing

std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw FieldError(path, "field '" + path + "' must be an object");
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key())) {
      const std::string field = join_path(path, it.key());
      throw FieldError(field, "unknown field '" + field + "'");
    }
}

template <class T>
T convert(const json& j, const std::string& field) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!j.is_number()) throw FieldError(field, "field '" + field + "' must be a number");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!j.is_number_integer() && !j.is_number_unsigned())
        throw FieldError(field, "field '" + field + "' must be an integer");
      if constexpr (std::is_unsigned_v<T>)
        if (j.is_number_integer() && j.get<long long>() < 0)
          throw FieldError(field, "field '" + field + "' must be non-negative");
    }
    return j.get<T>();
  } catch (const json::exception& e) {
    throw FieldError(field, "field '" + field + "' has the wrong type: " + e.what());
  }
}

template <class T>
std::optional<T> optional_field(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  return convert<T>(obj.at(key), join_path(path, key));
}

template <class T>
T required_field(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) {
    const std::string field = join_path(path, key);
    throw FieldError(field, "missing required field '" + field + "'");
  }
  return convert<T>(obj.at(key), join_path(path, key));
}

std::vector<double> number_list(const json& j, const std::string& field) {
  if (!j.is_array()) throw FieldError(field, "field '" + field + "' must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(convert<double>(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

Mode parse_mode(const std::string& name) {
  if (name == "discrete") return Mode::discrete;
  if (name == "series") return Mode::series;
  if (name == "jc_closed_form") return Mode::jc_closed_form;
  if (name == "thermal") return Mode::thermal;
  if (name == "convergence") return Mode::convergence;
  if (name == "certify") return Mode::certify;
  throw FieldError("mode", "unknown mode '" + name +
                               "' (expected discrete, series, jc_closed_form, thermal, convergence or certify)");
}

Matrix parse_matrix(const json& j, const std::string& field, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw FieldError(field, "field '" + field + "' must be a " + std::to_string(dim) + "x" + std::to_string(dim) +
                                " array");
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const std::string row_field = field + "[" + std::to_string(r) + "]";
    const std::vector<double> row = number_list(j[r], row_field);
    if (static_cast<int>(row.size()) != dim) throw FieldError(row_field, "row has the wrong length");
    for (int c = 0; c < dim; ++c) m(r, c) = row[c];
  }
  return m;
}

Coupling parse_coupling(const json& j) {
  const std::string path = "physics.coupling";
  require_object(j, path);
  const std::string type = required_field<std::string>(j, path, "type");
  Coupling c;
  if (type == "jc") {
    reject_unknown(j, path, {"type", "omega"});
    c.omega = optional_field<double>(j, path, "omega").value_or(1.0);
    if (!(c.omega > 0.0) || !std::isfinite(c.omega)) throw FieldError(path + ".omega", "omega must be finite and > 0");
    c.hamiltonian = jc_coupling(c.omega);
    return c;
  }
  if (type == "matrix") {
    reject_unknown(j, path, {"type", "system_dim", "ancilla_dim", "real", "imag", "omega"});
    c.is_jc = false;
    c.system_dim = required_field<int>(j, path, "system_dim");
    c.ancilla_dim = required_field<int>(j, path, "ancilla_dim");
    if (c.system_dim < 1 || c.ancilla_dim < 1) throw FieldError(path, "dimensions must be >= 1");
    c.omega = optional_field<double>(j, path, "omega").value_or(1.0);
    if (!(c.omega > 0.0) || !std::isfinite(c.omega)) throw FieldError(path + ".omega", "omega must be finite and > 0");
    const int dim = c.system_dim * c.ancilla_dim;
    if (!j.contains("real")) throw FieldError(path + ".real", "missing required field '" + path + ".real'");
    Matrix h = parse_matrix(j.at("real"), path + ".real", dim);
    if (j.contains("imag")) h += Complex(0.0, 1.0) * parse_matrix(j.at("imag"), path + ".imag", dim);
    try {
      c.hamiltonian = HermitianOperator(h);
    } catch (const InvariantError& e) {
      throw FieldError(path, std::string("coupling is not Hermitian: ") + e.what());
    }
    return c;
  }
  throw FieldError(path + ".type", "unknown coupling type '" + type + "' (expected jc or matrix)");
}

BathSpec parse_bath(const json& j) {
  const std::string path = "physics.bath";
  require_object(j, path);
  reject_unknown(j, path, {"kind", "energies", "beta", "weights"});
  const std::string kind = required_field<std::string>(j, path, "kind");
  if (kind == "pure_ground") return BathSpec::pure_ground();
  if (kind != "thermal") throw FieldError(path + ".kind", "unknown bath kind '" + kind + "'");
  if (j.contains("weights")) {
    if (j.contains("energies") || j.contains("beta"))
      throw FieldError(path, "give either weights or energies + beta, not both");
    return BathSpec::from_weights(number_list(j.at("weights"), path + ".weights"));
  }
  if (!j.contains("energies")) throw FieldError(path + ".energies", "missing required field '" + path + ".energies'");
  const std::vector<double> energies = number_list(j.at("energies"), path + ".energies");
  const double beta = required_field<double>(j, path, "beta");
  return BathSpec::thermal(energies, beta);
}

Range parse_range(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"start", "stop", "count"});
  Range r;
  r.start = required_field<double>(j, path, "start");
  r.stop = optional_field<double>(j, path, "stop").value_or(r.start);
  r.count = optional_field<int>(j, path, "count").value_or(1);
  if (r.count < 1) throw FieldError(path + ".count", "count must be >= 1");
  if (r.count > 1000000) throw FieldError(path + ".count", "count above 1e6");
  if (!std::isfinite(r.start) || !std::isfinite(r.stop)) throw FieldError(path, "range bounds must be finite");
  return r;
}

bool mode_needs_sampled_grid(Mode m) {
  return m == Mode::jc_closed_form || m == Mode::series || m == Mode::certify;
}

void parse_tolerances(const json& j, ToleranceProfile& t) {
  const std::string path = "tolerances";
  require_object(j, path);
  reject_unknown(j, path,
                 {"hermiticity", "unit_trace", "positivity", "kraus_completeness", "choi_trace", "choi_positivity",
                  "series_positivity", "series_trace", "beta_bound", "beta_imaginary"});
  auto read = [&](const char* key, double& slot) {
    if (auto v = optional_field<double>(j, path, key)) {
      if (!(*v >= 0.0) || !std::isfinite(*v)) throw FieldError(join_path(path, key), "tolerances must be finite and >= 0");
      slot = *v;
    }
  };
  read("hermiticity", t.hermiticity);
  read("unit_trace", t.unit_trace);
  read("positivity", t.positivity);
  read("kraus_completeness", t.kraus_completeness);
  read("choi_trace", t.choi_trace);
  read("choi_positivity", t.choi_positivity);
  read("series_positivity", t.series_positivity);
  read("series_trace", t.series_trace);
  read("beta_bound", t.beta_bound);
  read("beta_imaginary", t.beta_imaginary);
}

// ---------------------------------------------------------------- helpers

json tolerances_json(const ToleranceProfile& t) {
  return {{"hermiticity", t.hermiticity},
          {"unit_trace", t.unit_trace},
          {"positivity", t.positivity},
          {"kraus_completeness", t.kraus_completeness},
          {"choi_trace", t.choi_trace},
          {"choi_positivity", t.choi_positivity},
          {"series_positivity", t.series_positivity},
          {"series_trace", t.series_trace},
          {"beta_bound", t.beta_bound},
          {"beta_imaginary", t.beta_imaginary}};
}

// Ginibre draw, rho = G G^dagger / Tr. Same seed, same state on a given build.
DensityOperator random_density(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(dim, dim);
  for (int c = 0; c < dim; ++c)
    for (int r = 0; r < dim; ++r) g(r, c) = Complex(normal(rng), normal(rng));
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityOperator(std::move(rho));
}

QubitStateParams qubit_params(const DensityOperator& rho) {
  return {rho.matrix()(1, 1).real(), rho.matrix()(0, 1)};
}

DensityOperator initial_state(const ExperimentConfig& cfg) {
  const int dim = cfg.coupling.system_dim;
  if (cfg.random_initial_state) {
    std::mt19937_64 rng(cfg.seed);
    return random_density(dim, rng);
  }
  if (cfg.basis_state >= 0) {
    if (cfg.basis_state >= dim) throw FieldError("physics.initial_state.basis", "basis index outside the system");
    return DensityOperator::basis(dim, cfg.basis_state);
  }
  if (cfg.initial_qubit) {
    if (dim != 2) throw FieldError("physics.initial_state", "p/r parametrization needs a qubit system");
    return cfg.initial_qubit->density();
  }
  return DensityOperator::basis(dim, dim - 1);
}

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw ConfigError("write to '" + path.string() + "' failed");
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir.string() + "'");
}

std::string compiler_id() {
#if defined(__clang__)
  return std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  return std::string("gcc ") + __VERSION__;
#else
  return "unknown";
#endif
}

json base_manifest(const ExperimentConfig& cfg, const std::string& command, const fs::path& dir) {
  json m;
  m["tool"] = "nmcollide";
  m["version"] = kVersion;
  m["command"] = command;
  m["mode"] = mode_name(cfg.mode);
  m["seed"] = cfg.seed;
  m["output_dir"] = dir.string();
  m["config"] = cfg.source;
  m["effective_tolerances"] = tolerances_json(cfg.tolerances);
  m["build"] = {{"compiler", compiler_id()},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)},
#ifdef _OPENMP
                {"openmp", _OPENMP},
#endif
                {"csv_header", kCsvHeader}};
  m["threads"] = kernel_threads();
  return m;
}

// Time grids are given in tau = omega t.
TimeGrid physical_grid(const TimeGrid& tau_grid, double omega) { return {tau_grid.t_max / omega, tau_grid.n_points}; }

MemoryKernelMap make_kernel(const ExperimentConfig& cfg) {
  const Coupling& c = cfg.coupling;
  if (cfg.bath.kind() == BathKind::thermal)
    return build_thermal_kernel_map(c.hamiltonian, c.system_dim, c.ancilla_dim, cfg.bath.weights());
  return build_kernel_map(c.hamiltonian, c.system_dim, c.ancilla_dim);
}

bool closed_form_applies(const ExperimentConfig& cfg) {
  return cfg.coupling.is_jc && cfg.bath.kind() == BathKind::pure_ground;
}

double require_gamma(const ExperimentConfig& cfg) {
  if (!cfg.gamma_bar) throw FieldError("physics.gamma_bar", "missing required field 'physics.gamma_bar'");
  return *cfg.gamma_bar;
}

std::vector<double> certify_gammas(const ExperimentConfig& cfg) {
  if (!cfg.gamma_bars.empty()) return cfg.gamma_bars;
  if (cfg.gamma_bar) return {*cfg.gamma_bar};
  throw FieldError("physics.gamma_bar", "missing required field 'physics.gamma_bar' (or physics.gamma_bars)");
}

// Superoperator of the closed-form JC map, without the beta-inequality
// check, so a broken point reaches the certifier instead of aborting.
Superoperator jc_map(double tau, double gamma_bar) {
  return beta_map_superop(beta1(tau, gamma_bar), beta2(tau, gamma_bar));
}

std::optional<double> finite_or_empty(double v) {
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

// ---------------------------------------------------------------- modes

struct ModeOutput {
  std::vector<CsvRow> rows;
  std::vector<std::pair<std::string, json>> reports;  // extra JSON files
  json summary;
};

ModeOutput run_jc_closed_form(const ExperimentConfig& cfg) {
  if (!cfg.coupling.is_jc) throw FieldError("physics.coupling.type", "jc_closed_form needs the jc coupling");
  const double g = require_gamma(cfg);
  ModeOutput out;
  out.rows.resize(cfg.grid.n_points);
  parallel_for(cfg.grid.n_points, [&](int j) {
    const double tau = cfg.grid.at(j);
    const BetaPair b = beta_pair(tau, g);
    out.rows[j] = {tau, g, b.beta1, b.beta2, std::nullopt,
                   beta_map_superop(b.beta1, b.beta2).choi().min_eigenvalue()};
  });
  return out;
}

ModeOutput run_series_mode(const ExperimentConfig& cfg) {
  const double g = require_gamma(cfg);
  const MemoryKernelMap kernel = make_kernel(cfg);
  const double omega = cfg.coupling.omega;
  const SeriesResult res = lambda_series(kernel, g * omega, physical_grid(cfg.grid, omega), cfg.series);

  const bool beta_cols = closed_form_applies(cfg);
  ModeOutput out;
  out.rows.resize(cfg.grid.n_points);
  std::vector<double> closed_form_gap(cfg.grid.n_points, 0.0);
  parallel_for(cfg.grid.n_points, [&](int j) {
    const double tau = cfg.grid.at(j);
    const Matrix& s = res.maps[j].matrix();
    CsvRow row{tau, g, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
    if (beta_cols) {
      row.beta1 = s(1, 1).real();
      row.beta2 = s(3, 3).real();
      closed_form_gap[j] = max_abs(s - jc_map(tau, g).matrix());
    }
    try {
      row.min_choi = res.maps[j].choi().min_eigenvalue();
    } catch (const InvariantError&) {
      row.min_choi = -std::numeric_limits<double>::infinity();
    }
    out.rows[j] = row;
  });

  json report = {{"gamma_bar", g},
                 {"omega", omega},
                 {"grid_tau", to_json(cfg.grid)},
                 {"quadrature", cfg.series.quadrature == Quadrature::gregory ? "gregory" : "trapezoid"},
                 {"terms", res.terms},
                 {"residual", res.residual},
                 {"term_norms", res.term_norms},
                 {"kernel", kernel.description()}};
  if (beta_cols) {
    double worst = 0.0;
    for (double v : closed_form_gap) worst = std::max(worst, v);
    report["max_abs_deviation_from_closed_form"] = worst;
  }
  out.summary = {{"terms", res.terms}, {"residual", res.residual}};
  out.reports.emplace_back("series_report.json", std::move(report));
  return out;
}

struct DiscreteSetup {
  CollisionConfig collision;
  double gamma_bar;  // may be +inf when p_s = 0
};

DiscreteSetup discrete_setup(const ExperimentConfig& cfg, double omega_t_c) {
  const Coupling& c = cfg.coupling;
  DiscreteSetup s;
  s.collision.system_dim = c.system_dim;
  s.collision.ancilla_dim = c.ancilla_dim;
  s.collision.hamiltonian = c.hamiltonian;
  s.collision.t_c = omega_t_c / c.omega;
  s.collision.bath = cfg.bath;
  if (cfg.p_s) {
    s.collision.p_s = *cfg.p_s;
    s.gamma_bar = *cfg.p_s > 0.0 ? -std::log(*cfg.p_s) / omega_t_c : std::numeric_limits<double>::infinity();
  } else {
    s.gamma_bar = require_gamma(cfg);
    s.collision.p_s = std::exp(-s.gamma_bar * omega_t_c);
  }
  const double steps = std::round(cfg.grid.t_max / omega_t_c);
  if (steps < 1.0 || std::abs(steps * omega_t_c - cfg.grid.t_max) > 1e-9 * cfg.grid.t_max)
    throw FieldError("physics.omega_t_c", "omega_t_c must divide grid.tau_max");
  if (steps > 1e7) throw FieldError("physics.omega_t_c", "more than 1e7 collisions requested");
  s.collision.n_steps = static_cast<int>(steps);
  s.collision.validate();
  return s;
}

// Discrete trajectory against the continuous map at the collision times:
// the closed form for pure-bath JC, the convolution series otherwise.
ModeOutput run_discrete_mode(const ExperimentConfig& cfg, double omega_t_c) {
  const DiscreteSetup setup = discrete_setup(cfg, omega_t_c);
  const DensityOperator rho0 = initial_state(cfg);
  const TrajectoryRecord traj = run_discrete(setup.collision, rho0);
  const int n = static_cast<int>(traj.states.size());
  const double g = setup.gamma_bar;
  const bool finite_g = std::isfinite(g);
  const double omega = cfg.coupling.omega;

  ModeOutput out;
  out.rows.resize(n);
  std::vector<std::optional<Superoperator>> continuum(n);
  json summary = {{"p_s", setup.collision.p_s}, {"n_steps", setup.collision.n_steps}, {"omega_t_c", omega_t_c}};
  summary["gamma_bar"] = finite_g ? json(g) : json("inf");

  if (finite_g && closed_form_applies(cfg)) {
    parallel_for(n, [&](int k) { continuum[k] = jc_map(k * omega_t_c, g); });
    summary["reference"] = "closed_form";
  } else if (finite_g) {
    const TimeGrid grid{setup.collision.n_steps * setup.collision.t_c, n};
    SeriesResult res = lambda_series(make_kernel(cfg), g * omega, grid, cfg.series);
    for (int k = 0; k < n; ++k) continuum[k] = std::move(res.maps[k]);
    summary["reference"] = "series";
    summary["series_terms"] = res.terms;
  }

  double worst = 0.0;
  parallel_for(n, [&](int k) {
    const double tau = k * omega_t_c;
    CsvRow row{tau, finite_or_empty(g), std::nullopt, std::nullopt, std::nullopt, std::nullopt};
    if (continuum[k]) {
      const Superoperator& map = *continuum[k];
      if (closed_form_applies(cfg)) {
        row.beta1 = map.matrix()(1, 1).real();
        row.beta2 = map.matrix()(3, 3).real();
      }
      row.trace_distance = trace_distance(traj.states[k].matrix(), map.apply(rho0.matrix()));
      try {
        row.min_choi = map.choi().min_eigenvalue();
      } catch (const InvariantError&) {
        row.min_choi = -std::numeric_limits<double>::infinity();
      }
    }
    out.rows[k] = row;
  });
  for (const auto& r : out.rows)
    if (r.trace_distance) worst = std::max(worst, *r.trace_distance);
  if (finite_g) summary["max_trace_distance"] = worst;
  const Matrix& final_state = traj.states.back().matrix();
  summary["final_state_diagonal"] = json::array();
  for (int i = 0; i < final_state.rows(); ++i) summary["final_state_diagonal"].push_back(final_state(i, i).real());
  out.summary = summary;
  out.reports.emplace_back("trajectory_summary.json", summary);
  return out;
}

ModeOutput run_thermal_mode(const ExperimentConfig& cfg) {
  if (cfg.bath.kind() != BathKind::thermal) throw FieldError("physics.bath.kind", "thermal mode needs a thermal bath");
  return run_discrete_mode(cfg, cfg.omega_t_c);
}

ModeOutput run_convergence_mode(const ExperimentConfig& cfg) {
  if (!closed_form_applies(cfg)) throw FieldError("physics.coupling", "convergence mode needs jc coupling, pure bath");
  if (cfg.t_c_list.empty()) throw FieldError("physics.t_c_list", "missing required field 'physics.t_c_list'");
  const double g = require_gamma(cfg);
  QubitStateParams rho0{0.5, Complex(0.3, 0.2)};
  if (cfg.random_initial_state || cfg.initial_qubit || cfg.basis_state >= 0) rho0 = qubit_params(initial_state(cfg));
  const ConvergenceReport report = convergence_study(g, cfg.grid.t_max, cfg.t_c_list, rho0);

  ExperimentConfig finest = cfg;
  finest.p_s.reset();
  ModeOutput out = run_discrete_mode(finest, cfg.t_c_list.back());
  out.reports.clear();
  json j = to_json(report);
  bool monotone = true;
  for (std::size_t i = 1; i < report.errors.size(); ++i) monotone = monotone && report.errors[i] < report.errors[i - 1];
  j["monotone"] = monotone;
  out.summary = j;
  out.reports.emplace_back("convergence.json", j);
  return out;
}

// ---------------------------------------------------------------- certify

struct CertifyFamily {
  std::string name;
  CptTolerance tolerance;
  std::function<std::vector<Superoperator>(double)> maps;  // gamma_bar -> maps on the tau grid
};

CertifyFamily certify_family(const ExperimentConfig& cfg, bool tol_given) {
  CertifyFamily f;
  const bool series = cfg.mode == Mode::series || cfg.mode == Mode::thermal;
  if (series) {
    f.name = "series";
    f.tolerance = tol_given ? cfg.cpt : CptTolerance{tolerances().series_positivity, tolerances().series_trace};
    f.maps = [&cfg](double g) {
      const double omega = cfg.coupling.omega;
      return lambda_series(make_kernel(cfg), g * omega, physical_grid(cfg.grid, omega), cfg.series).maps;
    };
  } else {
    if (!cfg.coupling.is_jc) throw FieldError("physics.coupling.type", "closed-form certification needs jc coupling");
    f.name = "jc_closed_form";
    f.tolerance = cfg.cpt;
    f.maps = [&cfg](double g) {
      std::vector<Superoperator> maps(cfg.grid.n_points, Superoperator::identity(2));
      parallel_for(cfg.grid.n_points, [&](int j) { maps[j] = jc_map(cfg.grid.at(j), g); });
      return maps;
    };
  }
  return f;
}

// Applies every map to a few seeded random states; record of the worst
// trace and positivity defects seen.
json random_state_probe(const std::vector<Superoperator>& maps, std::uint64_t seed, int n_states) {
  if (maps.empty()) return json::object();
  std::mt19937_64 rng(seed);
  std::vector<DensityOperator> states;
  for (int i = 0; i < n_states; ++i) states.push_back(random_density(maps.front().dim(), rng));
  std::vector<double> trace_def(maps.size(), 0.0), min_eig(maps.size(), 0.0);
  parallel_for(static_cast<int>(maps.size()), [&](int j) {
    double td = 0.0, me = std::numeric_limits<double>::infinity();
    for (const auto& s : states) {
      Matrix out = maps[j].apply(s.matrix());
      td = std::max(td, std::abs(out.trace() - 1.0));
      me = std::min(me, min_hermitian_eigenvalue(0.5 * (out + out.adjoint())));
    }
    trace_def[j] = td;
    min_eig[j] = me;
  });
  double td = 0.0, me = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < maps.size(); ++j) {
    td = std::max(td, trace_def[j]);
    me = std::min(me, min_eig[j]);
  }
  return {{"states", n_states}, {"max_trace_defect", td}, {"min_output_eigenvalue", me}};
}

}  // namespace

// ---------------------------------------------------------------- public

std::vector<double> Range::values() const {
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = start;
    return v;
  }
  const double step = (stop - start) / (count - 1);
  for (int i = 0; i < count; ++i) v[i] = i == count - 1 ? stop : start + i * step;
  return v;
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::discrete: return "discrete";
    case Mode::series: return "series";
    case Mode::jc_closed_form: return "jc_closed_form";
    case Mode::thermal: return "thermal";
    case Mode::convergence: return "convergence";
    case Mode::certify: return "certify";
  }
  return "unknown";
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw FieldError("mode", "configuration must be an object; missing required field 'mode'");
  reject_unknown(doc, "",
                 {"mode", "output_path", "seed", "physics", "grid", "series", "certify", "sweep", "tolerances"});

  ExperimentConfig cfg;
  cfg.source = doc;
  cfg.mode = parse_mode(required_field<std::string>(doc, "", "mode"));
  if (auto v = optional_field<std::string>(doc, "", "output_path")) cfg.output_path = *v;
  if (cfg.output_path.empty()) throw FieldError("output_path", "output_path must not be empty");
  cfg.seed = optional_field<std::uint64_t>(doc, "", "seed").value_or(0);

  if (doc.contains("tolerances")) parse_tolerances(doc.at("tolerances"), cfg.tolerances);

  const json physics = doc.value("physics", json::object());
  require_object(physics, "physics");
  reject_unknown(physics, "physics",
                 {"coupling", "bath", "initial_state", "gamma_bar", "gamma_bars", "p_s", "omega_t_c", "t_c_list"});
  if (physics.contains("coupling")) cfg.coupling = parse_coupling(physics.at("coupling"));
  if (physics.contains("bath")) cfg.bath = parse_bath(physics.at("bath"));
  cfg.gamma_bar = optional_field<double>(physics, "physics", "gamma_bar");
  cfg.p_s = optional_field<double>(physics, "physics", "p_s");
  if (cfg.gamma_bar && cfg.p_s) throw FieldError("physics.p_s", "give gamma_bar or p_s, not both");
  if (cfg.gamma_bar && (!(*cfg.gamma_bar >= 0.0) || !std::isfinite(*cfg.gamma_bar)))
    throw FieldError("physics.gamma_bar", "gamma_bar must be finite and >= 0");
  if (cfg.p_s && !(*cfg.p_s >= 0.0 && *cfg.p_s <= 1.0)) throw FieldError("physics.p_s", "p_s must lie in [0, 1]");
  if (physics.contains("gamma_bars")) {
    cfg.gamma_bars = number_list(physics.at("gamma_bars"), "physics.gamma_bars");
    for (double g : cfg.gamma_bars)
      if (!(g >= 0.0) || !std::isfinite(g)) throw FieldError("physics.gamma_bars", "entries must be finite and >= 0");
  }
  if (auto v = optional_field<double>(physics, "physics", "omega_t_c")) {
    if (!(*v > 0.0) || !std::isfinite(*v)) throw FieldError("physics.omega_t_c", "omega_t_c must be finite and > 0");
    cfg.omega_t_c = *v;
  }
  if (physics.contains("t_c_list")) cfg.t_c_list = number_list(physics.at("t_c_list"), "physics.t_c_list");

  if (physics.contains("initial_state")) {
    const json& s = physics.at("initial_state");
    const std::string path = "physics.initial_state";
    if (s.is_string()) {
      if (s.get<std::string>() != "random") throw FieldError(path, "initial_state string must be \"random\"");
      cfg.random_initial_state = true;
    } else {
      require_object(s, path);
      reject_unknown(s, path, {"p", "r", "basis"});
      if (s.contains("basis")) {
        if (s.contains("p") || s.contains("r")) throw FieldError(path, "give basis or p/r, not both");
        cfg.basis_state = required_field<int>(s, path, "basis");
        if (cfg.basis_state < 0) throw FieldError(path + ".basis", "basis index must be >= 0");
      } else {
        QubitStateParams q{required_field<double>(s, path, "p"), 0.0};
        if (s.contains("r")) {
          const std::vector<double> r = number_list(s.at("r"), path + ".r");
          if (r.size() != 2) throw FieldError(path + ".r", "r must be [real, imag]");
          q.r = Complex(r[0], r[1]);
        }
        q.validate();
        cfg.initial_qubit = q;
      }
    }
  }

  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    require_object(g, "grid");
    reject_unknown(g, "grid", {"tau_max", "n_points", "dtau"});
    const double tau_max = required_field<double>(g, "grid", "tau_max");
    if (!(tau_max > 0.0) || !std::isfinite(tau_max)) throw FieldError("grid.tau_max", "tau_max must be finite and > 0");
    const auto n = optional_field<int>(g, "grid", "n_points");
    const auto dtau = optional_field<double>(g, "grid", "dtau");
    if (n && dtau) throw FieldError("grid.dtau", "give n_points or dtau, not both");
    try {
      if (n) {
        cfg.grid = {tau_max, *n};
        cfg.grid.validate();
      } else if (dtau) {
        cfg.grid = TimeGrid::with_step(tau_max, *dtau);
      } else if (mode_needs_sampled_grid(cfg.mode)) {
        throw FieldError("grid.n_points", "missing required field 'grid.n_points' (or grid.dtau)");
      } else {
        cfg.grid = {tau_max, 2};
      }
    } catch (const FieldError&) {
      throw;
    } catch (const ConfigError& e) {
      throw FieldError("grid", std::string("invalid grid: ") + e.what());
    }
    cfg.has_grid = true;
  } else if (!doc.contains("sweep")) {
    // Sweep-only configs may omit the grid; run and certify check has_grid.
    throw FieldError("grid.tau_max", "missing required field 'grid.tau_max'");
  }

  if (doc.contains("series")) {
    const json& s = doc.at("series");
    require_object(s, "series");
    reject_unknown(s, "series", {"k_max", "tail_tol", "parallel", "quadrature"});
    cfg.series.k_max = optional_field<int>(s, "series", "k_max").value_or(cfg.series.k_max);
    cfg.series.tail_tol = optional_field<double>(s, "series", "tail_tol").value_or(cfg.series.tail_tol);
    cfg.series.parallel = optional_field<bool>(s, "series", "parallel").value_or(true);
    if (auto q = optional_field<std::string>(s, "series", "quadrature")) {
      if (*q == "gregory")
        cfg.series.quadrature = Quadrature::gregory;
      else if (*q == "trapezoid")
        cfg.series.quadrature = Quadrature::trapezoid;
      else
        throw FieldError("series.quadrature", "quadrature must be gregory or trapezoid");
    }
    try {
      cfg.series.validate();
    } catch (const ConfigError& e) {
      throw FieldError("series", e.what());
    }
  }

  if (doc.contains("certify")) {
    const json& c = doc.at("certify");
    require_object(c, "certify");
    reject_unknown(c, "certify", {"choi_tol", "trace_tol"});
    cfg.cpt.choi = optional_field<double>(c, "certify", "choi_tol").value_or(cfg.cpt.choi);
    cfg.cpt.trace = optional_field<double>(c, "certify", "trace_tol").value_or(cfg.cpt.trace);
    if (!(cfg.cpt.choi >= 0.0) || !(cfg.cpt.trace >= 0.0)) throw FieldError("certify", "tolerances must be >= 0");
  }

  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    require_object(s, "sweep");
    reject_unknown(s, "sweep", {"gamma_bar", "tau"});
    if (s.contains("gamma_bar")) cfg.sweep_gamma_bar = parse_range(s.at("gamma_bar"), "sweep.gamma_bar");
    if (s.contains("tau")) cfg.sweep_tau = parse_range(s.at("tau"), "sweep.tau");
  }

  if (cfg.coupling.is_jc == false && (cfg.mode == Mode::jc_closed_form || cfg.mode == Mode::convergence))
    throw FieldError("physics.coupling.type", mode_name(cfg.mode) + " mode needs the jc coupling");
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FieldError("config", "cannot read configuration file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return parse_config(json::object());
  json doc;
  try {
    // Comments are allowed so configs can carry a license header.
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw FieldError("config", std::string("configuration is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

std::string csv_number(std::optional<double> value) {
  if (!value) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", *value);
  return buf;
}

std::string format_csv(const std::vector<CsvRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += csv_number(r.tau);
    out += ',';
    out += csv_number(r.gamma_bar);
    out += ',';
    out += csv_number(r.beta1);
    out += ',';
    out += csv_number(r.beta2);
    out += ',';
    out += csv_number(r.trace_distance);
    out += ',';
    out += csv_number(r.min_choi);
    out += '\n';
  }
  return out;
}

static void require_grid(const ExperimentConfig& cfg) {
  if (!cfg.has_grid) throw FieldError("grid.tau_max", "missing required field 'grid.tau_max'");
}

RunResult run_experiment(const ExperimentConfig& cfg, const fs::path& dir) {
  require_grid(cfg);
  if (cfg.mode == Mode::certify) return run_certify(cfg, dir);
  Stopwatch clock;
  ModeOutput result;
  switch (cfg.mode) {
    case Mode::jc_closed_form: result = run_jc_closed_form(cfg); break;
    case Mode::series: result = run_series_mode(cfg); break;
    case Mode::discrete: result = run_discrete_mode(cfg, cfg.omega_t_c); break;
    case Mode::thermal: result = run_thermal_mode(cfg); break;
    case Mode::convergence: result = run_convergence_mode(cfg); break;
    case Mode::certify: break;
  }

  prepare_dir(dir);
  RunResult run;
  run.outputs.push_back(dir / "results.csv");
  write_text(run.outputs.back(), format_csv(result.rows));
  for (const auto& [name, report] : result.reports) {
    run.outputs.push_back(dir / name);
    write_json(run.outputs.back(), report);
  }
  run.manifest = base_manifest(cfg, "run", dir);
  run.manifest["summary"] = result.summary;
  run.manifest["rows"] = result.rows.size();
  run.manifest["timings"] = {{"total_seconds", clock.seconds()}};
  return run;
}

RunResult run_sweep(const ExperimentConfig& cfg, const fs::path& dir) {
  if (!cfg.coupling.is_jc) throw FieldError("physics.coupling.type", "sweep evaluates the jc closed form");
  if (!cfg.sweep_gamma_bar) throw FieldError("sweep.gamma_bar", "missing required field 'sweep.gamma_bar'");
  if (!cfg.sweep_tau) throw FieldError("sweep.tau", "missing required field 'sweep.tau'");
  Stopwatch clock;
  const std::vector<double> gammas = cfg.sweep_gamma_bar->values();
  const std::vector<double> taus = cfg.sweep_tau->values();
  for (double g : gammas)
    if (!(g >= 0.0)) throw FieldError("sweep.gamma_bar", "gamma_bar values must be >= 0");
  for (double t : taus)
    if (!(t >= 0.0)) throw FieldError("sweep.tau", "tau values must be >= 0");

  const long long total = static_cast<long long>(gammas.size()) * static_cast<long long>(taus.size());
  if (total > 50000000LL) throw FieldError("sweep", "more than 5e7 sweep points");
  std::vector<CsvRow> rows(total);
  // Points are independent; each lands in its own slot, so the file order is
  // (gamma_bar, tau) lexicographic however the threads interleave.
  parallel_for(static_cast<int>(total), [&](int idx) {
    const double g = gammas[idx / taus.size()];
    const double tau = taus[idx % taus.size()];
    const BetaPair b = beta_pair(tau, g);
    rows[idx] = {tau, g, b.beta1, b.beta2, std::nullopt, beta_map_superop(b.beta1, b.beta2).choi().min_eigenvalue()};
  });

  prepare_dir(dir);
  RunResult run;
  run.outputs.push_back(dir / "sweep.csv");
  write_text(run.outputs.back(), format_csv(rows));
  run.manifest = base_manifest(cfg, "sweep", dir);
  run.manifest["rows"] = total;
  run.manifest["timings"] = {{"total_seconds", clock.seconds()}};
  return run;
}

RunResult run_certify(const ExperimentConfig& cfg, const fs::path& dir) {
  require_grid(cfg);
  Stopwatch clock;
  const bool tol_given = cfg.source.contains("certify");
  const CertifyFamily family = certify_family(cfg, tol_given);
  const std::vector<double> gammas = certify_gammas(cfg);

  std::vector<CsvRow> rows;
  json reports = json::array();
  bool verdict = true;
  for (double g : gammas) {
    const std::vector<Superoperator> maps = family.maps(g);
    const CptReport report = certify_cpt(maps, cfg.grid, g, family.tolerance);
    verdict = verdict && report.verdict;
    json j = to_json(report);
    j["random_states"] = random_state_probe(maps, cfg.seed, 8);
    double worst = std::numeric_limits<double>::infinity();
    for (double v : report.min_choi_eigenvalue) worst = std::min(worst, v);
    j["worst_min_choi_eigenvalue"] = std::isfinite(worst) ? json(worst) : json("-inf");
    reports.push_back(std::move(j));
    for (int k = 0; k < cfg.grid.n_points; ++k) {
      CsvRow row{cfg.grid.at(k), g, std::nullopt, std::nullopt, std::nullopt, report.min_choi_eigenvalue[k]};
      if (family.name == "jc_closed_form") {
        row.beta1 = maps[k].matrix()(1, 1).real();
        row.beta2 = maps[k].matrix()(3, 3).real();
      }
      rows.push_back(row);
    }
  }

  prepare_dir(dir);
  RunResult run;
  run.outputs.push_back(dir / "certify.csv");
  write_text(run.outputs.back(), format_csv(rows));
  const json summary = {{"family", family.name},
                        {"verdict", verdict},
                        {"tolerance", {{"choi", family.tolerance.choi}, {"trace", family.tolerance.trace}}},
                        {"reports", reports}};
  run.outputs.push_back(dir / "certify.json");
  write_json(run.outputs.back(), summary);
  run.manifest = base_manifest(cfg, "certify", dir);
  run.manifest["summary"] = {{"family", family.name}, {"verdict", verdict}};
  run.manifest["timings"] = {{"total_seconds", clock.seconds()}};
  if (!verdict) {
    run.exit_code = kExitCertification;
    run.error = json{{"error",
                      {{"exit_code", kExitCertification},
                       {"kind", "certification"},
                       {"message", "CPT certification failed; see certify.json"}}}};
  }
  return run;
}

RunResult execute_command(const std::string& command, const fs::path& config_path,
                          const std::optional<fs::path>& output_dir_override) {
  RunResult run;
  std::optional<fs::path> dir = output_dir_override;
  const ToleranceProfile saved = tolerances();
  auto fail = [&](int code, const std::string& kind, const std::string& message, const std::string& field) {
    run.exit_code = code;
    json e = {{"exit_code", code}, {"kind", kind}, {"message", message}};
    if (!field.empty()) e["field"] = field;
    run.error = json{{"error", e}};
  };
  try {
    const ExperimentConfig cfg = load_config(config_path);
    if (!dir) dir = fs::path(cfg.output_path);
    set_tolerances(cfg.tolerances);
    if (command == "run") {
      run = run_experiment(cfg, *dir);
    } else if (command == "sweep") {
      run = run_sweep(cfg, *dir);
    } else if (command == "certify") {
      run = run_certify(cfg, *dir);
    } else {
      throw FieldError("command", "unknown command '" + command + "'");
    }
    run.manifest["config_path"] = config_path.string();
    run.manifest["exit_code"] = run.exit_code;
    run.outputs.push_back(*dir / "manifest.json");
    write_json(run.outputs.back(), run.manifest);
  } catch (const FieldError& e) {
    fail(kExitConfig, "config", e.what(), e.field());
  } catch (const TruncationError& e) {
    fail(kExitNumerical, "truncation", e.what(), "");
  } catch (const NumericalError& e) {
    fail(kExitNumerical, "numerical", e.what(), "");
  } catch (const InvariantError& e) {
    fail(kExitNumerical, "invariant", e.what(), "");
  } catch (const ConfigError& e) {
    fail(kExitConfig, "config", e.what(), "");
  } catch (const std::exception& e) {
    fail(1, "internal", e.what(), "");
  }
  set_tolerances(saved);

  if (run.error && dir) {
    // Best effort: a broken output directory must not mask the original error.
    std::error_code ec;
    fs::create_directories(*dir, ec);
    if (!ec) {
      try {
        write_json(*dir / "error.json", *run.error);
      } catch (const std::exception&) {
      }
    }
  }
  return run;
}

}  // namespace nmc
