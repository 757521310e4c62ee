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

// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS
// and NMCOLLIDE_THREADS.

#include <benchmark/benchmark.h>

#include <vector>

#include "nmcollide/continuous_maps.hpp"
#include "nmcollide/convolution.hpp"
#include "nmcollide/jc_analytic.hpp"
#include "nmcollide/superoperator.hpp"
#include "nmcollide/verify.hpp"

namespace {

nmc::SuperopGrid jc_samples(int n_points) {
  const auto kernel = nmc::build_kernel_map(nmc::jc_coupling(1.0), 2, 2);
  return nmc::sample_kernel(kernel, {5.0, n_points});
}

void BM_ConvolveSerial(benchmark::State& state) {
  const auto a = jc_samples(static_cast<int>(state.range(0)));
  nmc::SuperopGrid out(a.dim(), a.size());
  for (auto _ : state) {
    nmc::convolve_serial(a, a, 1e-3, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}

void BM_ConvolveParallel(benchmark::State& state) {
  const auto a = jc_samples(static_cast<int>(state.range(0)));
  nmc::SuperopGrid out(a.dim(), a.size());
  for (auto _ : state) {
    nmc::convolve_parallel(a, a, 1e-3, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}

void BM_LambdaSeries(benchmark::State& state) {
  const auto kernel = nmc::build_kernel_map(nmc::jc_coupling(1.0), 2, 2);
  nmc::SeriesPolicy policy;
  policy.parallel = state.range(0) != 0;
  for (auto _ : state) {
    auto result = nmc::lambda_series(kernel, 1.0, nmc::TimeGrid::with_step(5.0, 1e-2), policy);
    benchmark::DoNotOptimize(result.maps.data());
  }
}

void BM_CertifyJcSweep(benchmark::State& state) {
  const nmc::TimeGrid grid = nmc::TimeGrid::with_step(20.0, 0.01);
  std::vector<nmc::Superoperator> maps;
  for (int j = 0; j < grid.n_points; ++j)
    maps.push_back(nmc::Superoperator::from_kraus(nmc::lambda_jc_channel(grid.at(j), 1.0)));
  for (auto _ : state) {
    auto report = nmc::certify_cpt(maps, grid, 1.0);
    benchmark::DoNotOptimize(report.verdict);
  }
}

}  // namespace

BENCHMARK(BM_ConvolveSerial)->Arg(500)->Arg(1000)->Arg(2000)->Arg(5001)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvolveParallel)->Arg(500)->Arg(1000)->Arg(2000)->Arg(5001)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LambdaSeries)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CertifyJcSweep)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
