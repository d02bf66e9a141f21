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

#ifndef BOSONKEY_TESTS_SUPPORT_HPP
#define BOSONKEY_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "bosonkey/combinatorics.hpp"
#include "bosonkey/linalg.hpp"
#include "bosonkey/rng.hpp"

namespace bosonkey::testing {

inline ComplexMatrix random_matrix(std::size_t n, Rng& rng) {
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(i, j) = Complex(rng.uniform01() * 2 - 1, rng.uniform01() * 2 - 1);
        }
    }
    return a;
}

// Drops N photons one at a time into uniformly chosen modes.
inline BosonConfig random_config(int modes, int photons, Rng& rng) {
    std::vector<int> occ(static_cast<std::size_t>(modes), 0);
    for (int k = 0; k < photons; ++k) {
        ++occ[rng.uniform_below(static_cast<std::uint64_t>(modes))];
    }
    return BosonConfig(std::move(occ));
}

inline double sum(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

// Plain log2 plug-in entropy, kept separate from the library's.
inline double plugin_entropy_bits(const std::vector<std::uint64_t>& counts) {
    double total = 0;
    for (auto c : counts) {
        total += static_cast<double>(c);
    }
    double h = 0;
    for (auto c : counts) {
        if (c > 0) {
            const double p = static_cast<double>(c) / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

} // namespace bosonkey::testing

#endif
