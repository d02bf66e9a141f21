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

#include "bosonkey/bosonsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bosonkey/errors.hpp"
#include "bosonkey/parallel.hpp"
#include "bosonkey/rng.hpp"

namespace bosonkey {

double occupation_factorial(const BosonConfig& config) {
    double product = 1.0;
    for (int n : config.occupations()) {
        for (int k = 2; k <= n; ++k) {
            product *= k;
        }
    }
    return product;
}

namespace {

void check_pair(const ModeUnitary& u, const BosonConfig& s) {
    if (s.modes() != u.modes()) {
        throw DomainError("seed configuration has " + std::to_string(s.modes()) +
                          " modes but the unitary acts on " + std::to_string(u.modes()));
    }
    if (static_cast<std::size_t>(s.photons()) > kMaxRyserSize) {
        throw ResourceError("photon number exceeds the permanent size cap");
    }
}

} // namespace

double transition_probability(const ModeUnitary& u, const BosonConfig& s, const BosonConfig& r,
                              PermanentMethod method) {
    const Complex per = permanent(submatrix_for(u, s, r), method);
    return std::norm(per) / (occupation_factorial(s) * occupation_factorial(r));
}

FineDistribution output_distribution(const ModeUnitary& u, const BosonConfig& s,
                                     const SimulationOptions& options) {
    check_pair(u, s);
    ConfigSpace space(s.modes(), s.photons());
    const auto outcomes = enumerate_configs(space);
    const double s_fact = occupation_factorial(s);

    std::vector<double> probs(outcomes.size());
    parallel_for(outcomes.size(), options.threads, [&](std::size_t k) {
        const Complex per = permanent(submatrix_for(u, s, outcomes[k]), options.method);
        if (options.law == ProbabilityLaw::born) {
            probs[k] = std::norm(per) / (s_fact * occupation_factorial(outcomes[k]));
        } else {
            probs[k] = std::abs(per);
        }
    });

    if (options.law == ProbabilityLaw::literal_abs) {
        double total = 0.0;
        for (double p : probs) {
            total += p;
        }
        if (total > 0.0) {
            for (double& p : probs) {
                p /= total;
            }
        }
    }
    return FineDistribution{std::move(space), u.source_seed(), s, std::move(probs)};
}

int argmax_smallest(std::span<const double> probs) {
    if (probs.empty()) {
        throw DomainError("argmax of an empty vector");
    }
    const double top = *std::max_element(probs.begin(), probs.end());
    for (std::size_t b = 0; b < probs.size(); ++b) {
        if (probs[b] >= top - kMpbTieTolerance) {
            return static_cast<int>(b);
        }
    }
    return 0; // unreachable for finite input
}

CoarseDistribution coarse_grain(const FineDistribution& fine, const BinningScheme& binning) {
    if (!(fine.space == binning.space())) {
        throw DomainError("coarse_grain: binning and distribution use different spaces");
    }
    if (fine.probs.size() != binning.labels().size()) {
        throw DomainError("coarse_grain: distribution length does not match the space");
    }
    std::vector<double> probs(static_cast<std::size_t>(binning.bin_count()), 0.0);
    const auto labels = binning.labels();
    for (std::size_t rank = 0; rank < fine.probs.size(); ++rank) {
        probs[labels[rank]] += fine.probs[rank];
    }
    const int mpb = argmax_smallest(probs);
    const double mpb_prob = probs[static_cast<std::size_t>(mpb)];
    return CoarseDistribution{binning, std::move(probs), mpb, mpb_prob};
}

int most_probable_bin(const ModeUnitary& u, const BosonConfig& s, const BinningScheme& binning,
                      const SimulationOptions& options) {
    return coarse_grain(output_distribution(u, s, options), binning).mpb;
}

std::vector<int> sample_bin(const CoarseDistribution& coarse, std::uint64_t rng_seed, int count) {
    if (count < 1) {
        throw DomainError("sample_bin: count must be >= 1");
    }
    std::vector<double> cdf(coarse.probs.size());
    double running = 0.0;
    int last_nonzero = 0;
    for (std::size_t b = 0; b < cdf.size(); ++b) {
        running += coarse.probs[b];
        cdf[b] = running;
        if (coarse.probs[b] > 0.0) {
            last_nonzero = static_cast<int>(b);
        }
    }

    Rng rng(rng_seed);
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double x = rng.uniform01() * running;
        int label = last_nonzero;
        for (std::size_t b = 0; b < cdf.size(); ++b) {
            if (x < cdf[b]) {
                label = static_cast<int>(b);
                break;
            }
        }
        out.push_back(label);
    }
    return out;
}

ComplexMatrix induced_nboson_unitary(const ModeUnitary& u, const ConfigSpace& space,
                                     const SimulationOptions& options) {
    if (space.modes() != u.modes()) {
        throw DomainError("induced_nboson_unitary: space and unitary mode counts differ");
    }
    const std::uint64_t dim = space.checked_size(kMaxInducedDimension);
    const auto configs = enumerate_configs(space);
    std::vector<double> norms(configs.size());
    for (std::size_t k = 0; k < configs.size(); ++k) {
        norms[k] = std::sqrt(occupation_factorial(configs[k]));
    }
    ComplexMatrix v(dim, dim);
    parallel_for(configs.size(), options.threads, [&](std::size_t r) {
        for (std::size_t s = 0; s < configs.size(); ++s) {
            const Complex per = permanent(submatrix_for(u, configs[s], configs[r]), options.method);
            v(r, s) = per / (norms[s] * norms[r]);
        }
    });
    return v;
}

std::string format_g17(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_fine_csv(std::ostream& out, const FineDistribution& fine) {
    out << "rank,probability\n";
    for (std::size_t k = 0; k < fine.probs.size(); ++k) {
        out << k << ',' << format_g17(fine.probs[k]) << '\n';
    }
}

void write_coarse_csv(std::ostream& out, const CoarseDistribution& coarse) {
    out << "bin,probability\n";
    for (std::size_t b = 0; b < coarse.probs.size(); ++b) {
        out << b << ',' << format_g17(coarse.probs[b]) << '\n';
    }
}

} // namespace bosonkey
