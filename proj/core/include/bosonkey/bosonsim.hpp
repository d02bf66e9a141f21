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

#ifndef BOSONKEY_BOSONSIM_HPP
#define BOSONKEY_BOSONSIM_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "bosonkey/combinatorics.hpp"
#include "bosonkey/linalg.hpp"

namespace bosonkey {

/**
 * How a transition weight is formed from the permanent.
 *
 * `born` is the physical law |Per(U_{s,r})|^2 / (prod s_j! prod r_j!), which
 * is normalized by itself. `literal_abs` uses the unsquared |Per(U_{s,r})|
 * and renormalizes over the outcome space; it exists for comparison runs
 * only and none of the exactness results hold for it.
 */
enum class ProbabilityLaw { born, literal_abs };

struct SimulationOptions {
    PermanentMethod method = PermanentMethod::ryser;
    ProbabilityLaw law = ProbabilityLaw::born;
    unsigned threads = 0; ///< 0 = hardware concurrency
};

/// Q(r | s; U) under the born law.
double transition_probability(const ModeUnitary& u, const BosonConfig& s, const BosonConfig& r,
                              PermanentMethod method = PermanentMethod::ryser);

/// Output distribution over the whole configuration space, indexed by rank.
struct FineDistribution {
    ConfigSpace space;
    std::optional<std::uint64_t> unitary_seed;
    BosonConfig seed_config;
    std::vector<double> probs;
};

FineDistribution output_distribution(const ModeUnitary& u, const BosonConfig& s,
                                     const SimulationOptions& options = {});

/// Bin masses of a fine distribution plus its most probable bin.
struct CoarseDistribution {
    BinningScheme binning;
    std::vector<double> probs;
    int mpb = 0;
    double mpb_prob = 0.0;
};

/// Sums fine probabilities into bins in ascending rank order. The MPB is the
/// first label attaining the maximum, so ties resolve to the smallest label.
CoarseDistribution coarse_grain(const FineDistribution& fine, const BinningScheme& binning);

/// Bins within this of the largest probability are tied; the smallest label wins.
/// Exact ties (e.g. a symmetric beamsplitter) otherwise split on rounding noise.
inline constexpr double kMpbTieTolerance = 1e-12;

int argmax_smallest(std::span<const double> probs);

int most_probable_bin(const ModeUnitary& u, const BosonConfig& s, const BinningScheme& binning,
                      const SimulationOptions& options = {});

/// `count` i.i.d. labels drawn by inverse CDF over coarse.probs.
std::vector<int> sample_bin(const CoarseDistribution& coarse, std::uint64_t rng_seed, int count);

inline constexpr std::uint64_t kMaxInducedDimension = 2000;

/// |S| x |S| matrix V with V[rank r][rank s] = Per(U_{s,r}) / sqrt(prod s_j! prod r_j!).
ComplexMatrix induced_nboson_unitary(const ModeUnitary& u, const ConfigSpace& space,
                                     const SimulationOptions& options = {});

/// prod_j n_j! over the occupations of `config`.
double occupation_factorial(const BosonConfig& config);

/// CSV `rank,probability`, 17 significant digits.
void write_fine_csv(std::ostream& out, const FineDistribution& fine);
/// CSV `bin,probability`, 17 significant digits.
void write_coarse_csv(std::ostream& out, const CoarseDistribution& coarse);

/// printf("%.17g"): round-trip exact for doubles.
std::string format_g17(double value);

} // namespace bosonkey

#endif
