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

#ifndef BOSONKEY_COMBINATORICS_HPP
#define BOSONKEY_COMBINATORICS_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace bosonkey {

using BigInt = boost::multiprecision::cpp_int;

/// Largest configuration space that may be materialized (enumerated, binned,
/// or used as a distribution support).
inline constexpr std::uint64_t kMaxMaterializedConfigs = 1'000'000;

/**
 * Occupation-number tuple: photons per mode.
 *
 * Entries are non-negative; zero occupations are required for the counting
 * formula C(M+N-1, N) to hold.
 */
class BosonConfig {
  public:
    BosonConfig() = default;
    /// Throws DomainError on negative entries or an empty tuple.
    explicit BosonConfig(std::vector<int> occupations);

    int modes() const { return static_cast<int>(occupations_.size()); }
    int photons() const;
    int operator[](std::size_t mode) const { return occupations_[mode]; }
    std::span<const int> occupations() const { return occupations_; }

    /// Mode index of every photon, ascending: (2,0,1) -> [0,0,2].
    std::vector<int> photon_modes() const;

    /// Comma-separated occupations, e.g. "2,0,1".
    std::string to_string() const;
    static BosonConfig parse(std::string_view text);

    friend bool operator==(const BosonConfig&, const BosonConfig&) = default;

  private:
    std::vector<int> occupations_;
};

/// Number of M-mode, N-photon configurations, C(M+N-1, N). Exact.
BigInt count_configs(int modes, int photons);

/// The set of all M-mode N-photon configurations.
class ConfigSpace {
  public:
    /// Requires modes >= 1 and photons >= 0.
    ConfigSpace(int modes, int photons);

    int modes() const { return modes_; }
    int photons() const { return photons_; }
    const BigInt& size() const { return size_; }

    /// Size as a machine integer. Throws ResourceError above `cap`.
    std::uint64_t checked_size(std::uint64_t cap = kMaxMaterializedConfigs) const;

    /// True when `config` has the right mode count and photon total.
    bool contains(const BosonConfig& config) const;

    friend bool operator==(const ConfigSpace& a, const ConfigSpace& b) {
        return a.modes_ == b.modes_ && a.photons_ == b.photons_;
    }

  private:
    int modes_;
    int photons_;
    BigInt size_;
};

/// All configurations in canonical order: descending lexicographic, so the
/// first config piles every photon into mode 0 and the last into mode M-1.
std::vector<BosonConfig> enumerate_configs(const ConfigSpace& space,
                                           std::uint64_t cap = kMaxMaterializedConfigs);

/// Position of `config` in the canonical order.
std::uint64_t rank_config(const ConfigSpace& space, const BosonConfig& config);

/// Inverse of rank_config.
BosonConfig unrank_config(const ConfigSpace& space, std::uint64_t index);

enum class BinningMode { contiguous, permuted };

std::string_view to_string(BinningMode mode);
BinningMode parse_binning_mode(std::string_view text);

/**
 * Partition of the ranked configuration space into d nearly equal bins.
 *
 * Bin l holds floor(|S|/d) + (l < R ? 1 : 0) configurations, R = |S| mod d.
 * In contiguous mode bin 0 takes the first ranks, bin 1 the next block, and
 * so on. In permuted mode the ranks are first shuffled with a seeded
 * Fisher-Yates permutation and the contiguous blocks are applied to the
 * shuffled order.
 *
 * Copies share the immutable rank->label table.
 */
class BinningScheme {
  public:
    const ConfigSpace& space() const { return space_; }
    int bin_count() const { return static_cast<int>(sizes_.size()); }
    BinningMode mode() const { return mode_; }
    std::uint64_t seed() const { return seed_; }

    std::span<const std::uint64_t> sizes() const { return sizes_; }
    int label_of(std::uint64_t rank) const { return static_cast<int>((*labels_)[rank]); }
    std::span<const std::uint32_t> labels() const { return *labels_; }

    /// Ranks assigned to `label`, ascending.
    std::vector<std::uint64_t> members(int label) const;

  private:
    friend BinningScheme make_binning(const ConfigSpace&, int, BinningMode, std::uint64_t);
    BinningScheme(ConfigSpace space, BinningMode mode, std::uint64_t seed,
                  std::vector<std::uint64_t> sizes, std::vector<std::uint32_t> labels);

    ConfigSpace space_;
    BinningMode mode_;
    std::uint64_t seed_;
    std::vector<std::uint64_t> sizes_;
    std::shared_ptr<const std::vector<std::uint32_t>> labels_;
};

/// Requires 2 <= d <= |S|. `seed` is only used in permuted mode.
BinningScheme make_binning(const ConfigSpace& space, int d,
                           BinningMode mode = BinningMode::contiguous, std::uint64_t seed = 0);

/// Bin sizes floor(total/d) + z_l with z_l = 1 for l < total mod d.
std::vector<std::uint64_t> equal_bin_sizes(std::uint64_t total, int d);

/// Bits needed to label a bin: floor(log2 d) + 1.
int bin_label_width(int d);

/// Fixed-width big-endian bit string for `label`, width bin_label_width(d).
std::string bin_label_bits(int label, int d);

} // namespace bosonkey

#endif
