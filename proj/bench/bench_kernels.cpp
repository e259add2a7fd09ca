// Copyright 2026 The kpo-aqec Authors
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

// Serial reference right-hand side against the OpenMP kernel, and the two
// propagation paths on a short evolution.
//
//   kpo_bench --benchmark_filter=Rhs

#include <benchmark/benchmark.h>

#include <random>

#include "kpo/kernels.hpp"
#include "kpo/lindblad.hpp"
#include "kpo/model.hpp"
#include "kpo/units.hpp"

using namespace kpo;

namespace {

struct Problem {
    Matrix h;
    std::vector<Matrix> collapse;
    Matrix rho;

    // The reference system at dim_a x dim_b with a random mixed state.
    Problem(int dim_a, int dim_b) {
        const model::SystemParams p = model::SystemParams::reference();
        h = model::build_full_system(p, dim_a, dim_b).h_static.matrix();
        for (const Operator& c : model::collapse_operators(model::NoiseParams::reference(), dim_a, dim_b)) {
            collapse.push_back(c.matrix());
        }
        const int n = dim_a * dim_b;
        std::mt19937 rng(7);
        std::normal_distribution<double> g;
        Matrix x(n, n);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) x(i, j) = {g(rng), g(rng)};
        }
        rho = x * x.adjoint();
        rho /= rho.trace();
    }
};

void BM_RhsReference(benchmark::State& state) {
    const Problem prob(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    Matrix out;
    for (auto _ : state) {
        lindblad::reference_rhs(prob.h, prob.collapse, prob.rho, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_RhsKernel(benchmark::State& state) {
    const Problem prob(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    lindblad::set_kernel_threads(static_cast<int>(state.range(2)));
    const lindblad::LindbladKernel kernel(prob.collapse);
    Matrix h_eff, out;
    kernel.effective_hamiltonian(prob.h, h_eff);
    for (auto _ : state) {
        kernel.apply(h_eff, prob.rho, out);
        benchmark::DoNotOptimize(out.data());
    }
    lindblad::set_kernel_threads(1);
}

void BM_Evolve(benchmark::State& state) {
    const int dim_a = static_cast<int>(state.range(0));
    const int dim_b = static_cast<int>(state.range(1));
    const model::SystemParams p = model::SystemParams::reference();
    const model::FullSystem sys = model::build_full_system(p, dim_a, dim_b);
    const auto collapse = model::collapse_operators(model::NoiseParams::reference(), dim_a, dim_b);
    lindblad::EvolveSpec spec;
    spec.initial = DensityState::from_pure(tensor(fock_state(dim_a, 2), fock_state(dim_b, 0)));
    spec.t_final = units::us(0.2);
    spec.sample_times = {spec.t_final};
    spec.tones = {{units::mhz(0.25), p.delta_an + units::mhz(0.36)}};
    spec.propagation = state.range(2) == 0 ? lindblad::Propagation::direct
                                           : lindblad::Propagation::interaction_picture;
    for (auto _ : state) {
        const lindblad::TimeSeries s = lindblad::evolve(sys, collapse, spec);
        state.counters["steps"] = static_cast<double>(s.diagnostics.steps.accepted);
    }
}

}  // namespace

BENCHMARK(BM_RhsReference)->Args({12, 2})->Args({30, 3})->Args({40, 5})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RhsKernel)
    ->ArgsProduct({{12}, {2}, {1}})
    ->ArgsProduct({{30, 40}, {3, 5}, {1, 2, 4}})
    ->Unit(benchmark::kMicrosecond);
// Third argument: 0 direct, 1 interaction picture.
BENCHMARK(BM_Evolve)->Args({12, 2, 0})->Args({12, 2, 1})->Args({20, 2, 0})->Args({20, 2, 1})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
