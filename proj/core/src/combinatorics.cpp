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

#include "bosonkey/combinatorics.hpp"

#include <bit>
#include <charconv>
#include <limits>
#include <numeric>

#include "bosonkey/errors.hpp"
#include "bosonkey/rng.hpp"

namespace bosonkey {

namespace {

__extension__ typedef unsigned __int128 u128;

// C(n, k) in 64 bits; throws ResourceError on overflow.
std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k) {
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // result * (n - k + i) / i is C(n - k + i, i), always integral
        u128 wide = static_cast<u128>(result) * (n - k + i);
        wide /= i;
        if (wide > std::numeric_limits<std::uint64_t>::max()) {
            throw ResourceError("binomial coefficient exceeds 64 bits");
        }
        result = static_cast<std::uint64_t>(wide);
    }
    return result;
}

// Configurations of `photons` photons in `modes` modes; modes == 0 is the empty tuple.
std::uint64_t count_u64(int modes, int photons) {
    if (modes == 0) {
        return photons == 0 ? 1 : 0;
    }
    return binomial_u64(static_cast<std::uint64_t>(modes + photons - 1),
                        static_cast<std::uint64_t>(photons));
}

} // namespace

BosonConfig::BosonConfig(std::vector<int> occupations) : occupations_(std::move(occupations)) {
    if (occupations_.empty()) {
        throw DomainError("BosonConfig: at least one mode is required");
    }
    for (int n : occupations_) {
        if (n < 0) {
            throw DomainError("BosonConfig: occupations must be non-negative");
        }
    }
}

int BosonConfig::photons() const {
    return std::accumulate(occupations_.begin(), occupations_.end(), 0);
}

std::vector<int> BosonConfig::photon_modes() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(photons()));
    for (int mode = 0; mode < modes(); ++mode) {
        out.insert(out.end(), static_cast<std::size_t>(occupations_[mode]), mode);
    }
    return out;
}

std::string BosonConfig::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < occupations_.size(); ++i) {
        if (i != 0) {
            out += ',';
        }
        out += std::to_string(occupations_[i]);
    }
    return out;
}

BosonConfig BosonConfig::parse(std::string_view text) {
    std::vector<int> values;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        std::string_view token = text.substr(pos, comma - pos);
        while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
        while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
        int value = 0;
        const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (token.empty() || ec != std::errc{} || end != token.data() + token.size()) {
            throw DomainError("BosonConfig: cannot parse '" + std::string(text) + "'");
        }
        values.push_back(value);
        pos = comma + 1;
    }
    return BosonConfig(std::move(values));
}

BigInt count_configs(int modes, int photons) {
    if (modes < 1) {
        throw DomainError("count_configs: modes must be >= 1");
    }
    if (photons < 0) {
        throw DomainError("count_configs: photons must be >= 0");
    }
    // C(M+N-1, N) = prod_{i=1..N} (M-1+i)/i, exact at every step
    BigInt result = 1;
    for (int i = 1; i <= photons; ++i) {
        result *= modes - 1 + i;
        result /= i;
    }
    return result;
}

ConfigSpace::ConfigSpace(int modes, int photons)
    : modes_(modes), photons_(photons), size_(count_configs(modes, photons)) {}

std::uint64_t ConfigSpace::checked_size(std::uint64_t cap) const {
    if (size_ > cap) {
        throw ResourceError("configuration space of " + size_.str() +
                            " elements exceeds the cap of " + std::to_string(cap));
    }
    return size_.convert_to<std::uint64_t>();
}

bool ConfigSpace::contains(const BosonConfig& config) const {
    return config.modes() == modes_ && config.photons() == photons_;
}

std::vector<BosonConfig> enumerate_configs(const ConfigSpace& space, std::uint64_t cap) {
    const std::uint64_t total = space.checked_size(cap);
    const int m = space.modes();
    std::vector<BosonConfig> out;
    out.reserve(total);

    std::vector<int> occ(static_cast<std::size_t>(m), 0);
    occ[0] = space.photons();
    out.emplace_back(occ);
    while (out.size() < total) {
        // rightmost non-last mode holding a photon gives one up; everything
        // to its right collapses into the next mode
        int i = m - 2;
        while (occ[i] == 0) {
            --i;
        }
        const int tail = occ[m - 1];
        occ[m - 1] = 0;
        --occ[i];
        occ[i + 1] = tail + 1;
        out.emplace_back(occ);
    }
    return out;
}

std::uint64_t rank_config(const ConfigSpace& space, const BosonConfig& config) {
    if (!space.contains(config)) {
        throw DomainError("rank_config: configuration " + config.to_string() +
                          " is not in the space");
    }
    space.checked_size(std::numeric_limits<std::uint64_t>::max());
    const int m = space.modes();
    std::uint64_t rank = 0;
    int remaining = space.photons();
    for (int i = 0; i + 1 < m; ++i) {
        const int v = config[static_cast<std::size_t>(i)];
        const int rest = m - i - 1;
        // configs sharing the prefix but with more photons in mode i:
        // sum_{t=0}^{R-v-1} C(rest-1+t, t) = C(rest+R-v-1, R-v-1)
        if (v < remaining) {
            rank += binomial_u64(static_cast<std::uint64_t>(rest + remaining - v - 1),
                                 static_cast<std::uint64_t>(remaining - v - 1));
        }
        remaining -= v;
    }
    return rank;
}

BosonConfig unrank_config(const ConfigSpace& space, std::uint64_t index) {
    const std::uint64_t total = space.checked_size(std::numeric_limits<std::uint64_t>::max());
    if (index >= total) {
        throw DomainError("unrank_config: index " + std::to_string(index) +
                          " out of range [0, " + std::to_string(total) + ")");
    }
    const int m = space.modes();
    std::vector<int> occ(static_cast<std::size_t>(m), 0);
    int remaining = space.photons();
    for (int i = 0; i + 1 < m; ++i) {
        const int rest = m - i - 1;
        int v = remaining;
        for (; v > 0; --v) {
            const std::uint64_t block = count_u64(rest, remaining - v);
            if (index < block) {
                break;
            }
            index -= block;
        }
        occ[static_cast<std::size_t>(i)] = v;
        remaining -= v;
    }
    occ[static_cast<std::size_t>(m - 1)] = remaining;
    return BosonConfig(std::move(occ));
}

std::string_view to_string(BinningMode mode) {
    return mode == BinningMode::contiguous ? "contiguous" : "permuted";
}

BinningMode parse_binning_mode(std::string_view text) {
    if (text == "contiguous") {
        return BinningMode::contiguous;
    }
    if (text == "permuted") {
        return BinningMode::permuted;
    }
    throw DomainError("unknown binning mode '" + std::string(text) + "'");
}

BinningScheme::BinningScheme(ConfigSpace space, BinningMode mode, std::uint64_t seed,
                             std::vector<std::uint64_t> sizes, std::vector<std::uint32_t> labels)
    : space_(std::move(space)),
      mode_(mode),
      seed_(seed),
      sizes_(std::move(sizes)),
      labels_(std::make_shared<const std::vector<std::uint32_t>>(std::move(labels))) {}

std::vector<std::uint64_t> BinningScheme::members(int label) const {
    if (label < 0 || label >= bin_count()) {
        throw DomainError("BinningScheme::members: label out of range");
    }
    std::vector<std::uint64_t> out;
    out.reserve(sizes_[static_cast<std::size_t>(label)]);
    for (std::uint64_t rank = 0; rank < labels_->size(); ++rank) {
        if ((*labels_)[rank] == static_cast<std::uint32_t>(label)) {
            out.push_back(rank);
        }
    }
    return out;
}

std::vector<std::uint64_t> equal_bin_sizes(std::uint64_t total, int d) {
    if (d < 1) {
        throw DomainError("equal_bin_sizes: d must be positive");
    }
    const auto bins = static_cast<std::uint64_t>(d);
    const std::uint64_t base = total / bins;
    const std::uint64_t remainder = total % bins;
    std::vector<std::uint64_t> sizes(bins);
    for (std::uint64_t l = 0; l < bins; ++l) {
        sizes[l] = base + (l < remainder ? 1 : 0);
    }
    return sizes;
}

BinningScheme make_binning(const ConfigSpace& space, int d, BinningMode mode, std::uint64_t seed) {
    const std::uint64_t total = space.checked_size();
    if (d < 2) {
        throw DomainError("make_binning: need at least 2 bins");
    }
    if (static_cast<std::uint64_t>(d) > total) {
        throw DomainError("make_binning: " + std::to_string(d) + " bins exceed |S| = " +
                          std::to_string(total));
    }
    auto sizes = equal_bin_sizes(total, d);

    // order[pos] = rank placed at position pos before slicing into blocks
    std::vector<std::uint64_t> order(total);
    std::iota(order.begin(), order.end(), std::uint64_t{0});
    if (mode == BinningMode::permuted) {
        Rng rng(seed);
        for (std::uint64_t i = total - 1; i > 0; --i) {
            std::swap(order[i], order[rng.uniform_below(i + 1)]);
        }
    }

    std::vector<std::uint32_t> labels(total);
    std::uint64_t pos = 0;
    for (std::size_t l = 0; l < sizes.size(); ++l) {
        for (std::uint64_t k = 0; k < sizes[l]; ++k, ++pos) {
            labels[order[pos]] = static_cast<std::uint32_t>(l);
        }
    }
    return BinningScheme(space, mode, mode == BinningMode::permuted ? seed : 0, std::move(sizes),
                         std::move(labels));
}

int bin_label_width(int d) {
    if (d < 1) {
        throw DomainError("bin_label_width: d must be positive");
    }
    return std::bit_width(static_cast<unsigned>(d));
}

std::string bin_label_bits(int label, int d) {
    const int width = bin_label_width(d);
    if (label < 0 || label >= d) {
        throw DomainError("bin_label_bits: label " + std::to_string(label) +
                          " not in Z_" + std::to_string(d));
    }
    std::string bits(static_cast<std::size_t>(width), '0');
    for (int i = 0; i < width; ++i) {
        if ((label >> (width - 1 - i)) & 1) {
            bits[static_cast<std::size_t>(i)] = '1';
        }
    }
    return bits;
}

} // namespace bosonkey
