/*
 * Copyright 2026 The bosonkey Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include "bosonkey/linalg.hpp"
#include "bosonkey/rng.hpp"

namespace {

using namespace bosonkey;

ComplexMatrix sample(std::size_t n) {
    Rng rng(n);
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(i, j) = Complex(rng.normal(), rng.normal());
        }
    }
    return a;
}

void BM_Ryser(benchmark::State& state) {
    const auto a = sample(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(permanent(a, PermanentMethod::ryser));
    }
    state.SetComplexityN(state.range(0));
}
// n >= 16 takes the compensated path
BENCHMARK(BM_Ryser)->DenseRange(2, 20, 2);

void BM_Naive(benchmark::State& state) {
    const auto a = sample(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(permanent(a, PermanentMethod::naive));
    }
}
BENCHMARK(BM_Naive)->DenseRange(2, 9);

void BM_Haar(benchmark::State& state) {
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(haar_unitary(static_cast<int>(state.range(0)), ++seed));
    }
}
BENCHMARK(BM_Haar)->Arg(12)->Arg(32)->Arg(64);

} // namespace
