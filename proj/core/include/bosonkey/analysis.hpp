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

#ifndef BOSONKEY_ANALYSIS_HPP
#define BOSONKEY_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "bosonkey/bosonsim.hpp"
#include "bosonkey/combinatorics.hpp"
#include "bosonkey/linalg.hpp"

namespace bosonkey {

/// Tolerance for normalization and other algebraic identities.
inline constexpr double kIdentityTolerance = 1e-9;
/// Slack added to entropy-bound comparisons to absorb summation round-off.
inline constexpr double kEntropySlack = 1e-12;

/// Two probability vectors over Z_d. Both must be non-negative, normalized to
/// within kIdentityTolerance, and of equal length.
class DistributionPair {
  public:
    DistributionPair(std::vector<double> p, std::vector<double> q);

    std::span<const double> p() const { return p_; }
    std::span<const double> q() const { return q_; }
    std::size_t size() const { return p_.size(); }

  private:
    std::vector<double> p_;
    std::vector<double> q_;
};

/// D = 1/2 sum_k |p_k - q_k|.
double statistical_distance(std::span<const double> p, std::span<const double> q);
double statistical_distance(const DistributionPair& pair);

/// epsilon = d / (2 |S|), evaluated as an exact rational then rounded.
double epsilon_bound(const ConfigSpace& space, int d);

/// Seed prior for the seed-averaged bin mass.
class SeedWeights {
  public:
    static SeedWeights uniform() { return SeedWeights(); }
    /// One weight per rank; non-negative, summing to 1 within kIdentityTolerance.
    static SeedWeights explicit_weights(std::vector<double> weights);
    /// All weight on one seed.
    static SeedWeights point_mass(const ConfigSpace& space, const BosonConfig& seed);

    bool is_uniform() const { return !weights_; }
    /// Weight of rank `rank` in a space of `total` seeds.
    double weight(std::uint64_t rank, std::uint64_t total) const;
    const std::optional<std::vector<double>>& weights() const { return weights_; }

  private:
    SeedWeights() = default;
    std::optional<std::vector<double>> weights_;
};

/// Coarse distribution of every seed in rank order.
struct SeedSweep {
    std::vector<std::vector<double>> bin_probs;
    std::vector<int> mpb;
};

SeedSweep sweep_seeds(const ModeUnitary& u, const BinningScheme& binning,
                      const SimulationOptions& options = {});

/// p_BS(k) = sum_s p(s) P(k | s; U), accumulated in ascending seed rank.
std::vector<double> seed_averaged_bin_mass(const ModeUnitary& u, const BinningScheme& binning,
                                           const SeedWeights& weights = SeedWeights::uniform(),
                                           const SimulationOptions& options = {});
std::vector<double> seed_averaged_bin_mass(const SeedSweep& sweep, const BinningScheme& binning,
                                           const SeedWeights& weights = SeedWeights::uniform());

/// #{s : MPB(s) = k}.
std::vector<std::uint64_t> mpb_label_counts(const SeedSweep& sweep, int d);

/// #{s : MPB(s) = k} / |S|.
std::vector<double> mpb_label_frequency(const ModeUnitary& u, const BinningScheme& binning,
                                        const SimulationOptions& options = {});
std::vector<double> mpb_label_frequency(const SeedSweep& sweep, int d);

enum class EntropyUnit { bits, dits };

/// -sum p log p with 0 log 0 = 0. Dits use base d = p.size().
double shannon_entropy(std::span<const double> p, EntropyUnit unit = EntropyUnit::bits);

/// Bound on |H(p_BS) - H(p_uni)|: 2d/sqrt|S| in bits, 2d log2(d)/sqrt|S| in
/// dits. Only claimed for epsilon <= 1/4; throws PreconditionError otherwise.
double entropy_gap_bound(const ConfigSpace& space, int d, EntropyUnit unit);

/// Entropy continuity bound -2D log2(2D/d), in bits, for 0 <= D <= 1/4.
double entropy_continuity_bound(double distance, int d);

struct BoundChecks {
    /// seed-averaged bin mass equals |B_k|/|S| entrywise within kIdentityTolerance
    bool binmass_matches_sizes = false;
    /// D = 0 when d divides |S|, D < epsilon otherwise
    bool distance_within_epsilon = false;
    /// entropy bounds, only present when epsilon <= 1/4
    std::optional<bool> entropy_within_continuity;
    std::optional<bool> entropy_within_bits_bound;
    std::optional<bool> entropy_within_dits_bound;

    bool all() const;
};

struct IndistinguishabilityReport {
    int modes = 0;
    int photons = 0;
    int bins = 0;
    BinningMode binning_mode = BinningMode::contiguous;
    std::uint64_t binning_seed = 0;
    std::optional<std::uint64_t> unitary_seed;
    std::uint64_t space_size = 0;

    std::vector<double> p_bs_binmass;
    std::vector<double> p_mpb_freq;
    std::vector<double> p_expected; ///< |B_k| / |S|

    double binmass_residual = 0.0; ///< max_k |p_bs_binmass - p_expected|
    double distance_binmass = 0.0;
    double distance_mpb = 0.0;
    double epsilon = 0.0;

    double entropy_bits = 0.0; ///< H(p_bs_binmass) in bits
    double entropy_gap_bits = 0.0;
    double entropy_gap_dits = 0.0;
    double entropy_gap_mpb_bits = 0.0; ///< reported only, no bound claimed

    std::optional<double> continuity_bound_bits;
    std::optional<double> entropy_bound_bits;
    std::optional<double> entropy_bound_dits;

    BoundChecks bounds_hold;
};

/// Exhaustive check of the indistinguishability bounds for one unitary and
/// binning: both seed marginals, their distances to uniform, epsilon, entropy
/// gaps, and whether each claimed bound holds.
IndistinguishabilityReport verify_indistinguishability(const ModeUnitary& u,
                                                       const BinningScheme& binning,
                                                       const SimulationOptions& options = {});

nlohmann::json report_to_json(const IndistinguishabilityReport& report);
IndistinguishabilityReport report_from_json(const nlohmann::json& j);

/// CSV `bin,p_bs_binmass,p_mpb_freq,p_uni`, one row per bin.
void write_report_csv(std::ostream& out, const IndistinguishabilityReport& report);

} // namespace bosonkey

#endif
