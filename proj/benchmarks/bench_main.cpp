/*
   Copyright 2026 The mfsim Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mfsim/noise.hpp"
#include "mfsim/particles.hpp"
#include "mfsim/philox.hpp"
#include "mfsim/solver.hpp"

using namespace mfsim;

static void BM_HeatStep(benchmark::State& state) {
    const double dx = 1.0 / static_cast<double>(state.range(0));
    const SpaceGrid grid(dx, 8.0);
    ModelParams params;
    const auto init = InitialCondition::truncated_gaussian(2.0, 0.5).tabulate(grid);
    for (auto _ : state) {
        auto r = heat_step(init, params, 0.0, 0.0, 1e-3, grid);
        benchmark::DoNotOptimize(r.step_leak);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.n_points()));
}
BENCHMARK(BM_HeatStep)->Arg(100)->Arg(200)->Arg(1000);

static void BM_Cascade(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-0.01, 2.0);
    std::vector<double> xs(n);
    for (auto& x : xs) x = u(rng);
    ModelParams params;
    for (auto _ : state) {
        auto r = cascade_size(xs, n, 0.0, params);
        benchmark::DoNotOptimize(r.k_absorbed);
    }
}
BENCHMARK(BM_Cascade)->Arg(1000)->Arg(100000);

static void BM_ParticleStep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const TimeGrid grid(1e-3, 1000);
    ModelParams params;
    params.rho = 0.5;
    const auto common = Forcing::brownian(generate_noise(1, grid));
    const IdiosyncraticNoise noise(2, grid.dt());
    auto particles = make_state(sample_initial_positions(InitialCondition::uniform(1.0, 2.0), n, 3));
    std::vector<double> dw(n);
    for (auto _ : state) {
        const std::size_t k = particles.k % grid.n_steps();
        particles.k = k;
        for (std::size_t i = 0; i < n; ++i) dw[i] = noise.increment(i, k);
        particles = diffuse_step(std::move(particles), params, common, dw, grid);
        resolve_cascade(particles, params);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_ParticleStep)->Arg(10000);

static void BM_PhiloxNormal(benchmark::State& state) {
    std::uint64_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(rng::standard_normal({1, 0, i++, 0}));
}
BENCHMARK(BM_PhiloxNormal);
BENCHMARK_MAIN();
