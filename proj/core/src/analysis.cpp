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

#include "bosonkey/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "bosonkey/errors.hpp"
#include "bosonkey/parallel.hpp"

namespace bosonkey {

namespace {

void check_probability_vector(std::span<const double> p, const char* what) {
    double total = 0.0;
    for (double x : p) {
        if (!(x >= 0.0)) {
            throw DomainError(std::string(what) + ": entries must be non-negative");
        }
        total += x;
    }
    if (std::abs(total - 1.0) > kIdentityTolerance) {
        throw DomainError(std::string(what) + ": entries must sum to 1");
    }
}

} // namespace

DistributionPair::DistributionPair(std::vector<double> p, std::vector<double> q)
    : p_(std::move(p)), q_(std::move(q)) {
    if (p_.size() != q_.size()) {
        throw DomainError("DistributionPair: length mismatch");
    }
    if (p_.empty()) {
        throw DomainError("DistributionPair: empty distributions");
    }
    check_probability_vector(p_, "DistributionPair.p");
    check_probability_vector(q_, "DistributionPair.q");
}

double statistical_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw DomainError("statistical_distance: length mismatch (" + std::to_string(p.size()) +
                          " vs " + std::to_string(q.size()) + ")");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        sum += std::abs(p[k] - q[k]);
    }
    return 0.5 * sum;
}

double statistical_distance(const DistributionPair& pair) {
    return statistical_distance(pair.p(), pair.q());
}

double epsilon_bound(const ConfigSpace& space, int d) {
    if (d < 2) {
        throw DomainError("epsilon_bound: d must be >= 2");
    }
    using boost::multiprecision::cpp_rational;
    const cpp_rational eps(BigInt(d), BigInt(2) * space.size());
    return eps.convert_to<double>();
}

SeedWeights SeedWeights::explicit_weights(std::vector<double> weights) {
    if (weights.empty()) {
        throw DomainError("SeedWeights: empty weight vector");
    }
    check_probability_vector(weights, "SeedWeights");
    SeedWeights out;
    out.weights_ = std::move(weights);
    return out;
}

SeedWeights SeedWeights::point_mass(const ConfigSpace& space, const BosonConfig& seed) {
    std::vector<double> weights(space.checked_size(), 0.0);
    weights[rank_config(space, seed)] = 1.0;
    return explicit_weights(std::move(weights));
}

double SeedWeights::weight(std::uint64_t rank, std::uint64_t total) const {
    if (!weights_) {
        return 1.0 / static_cast<double>(total);
    }
    return (*weights_)[rank];
}

SeedSweep sweep_seeds(const ModeUnitary& u, const BinningScheme& binning,
                      const SimulationOptions& options) {
    const ConfigSpace& space = binning.space();
    if (space.modes() != u.modes()) {
        throw DomainError("sweep_seeds: binning space and unitary mode counts differ");
    }
    const auto seeds = enumerate_configs(space);
    SeedSweep sweep;
    sweep.bin_probs.resize(seeds.size());
    sweep.mpb.resize(seeds.size());
    SimulationOptions inner = options;
    inner.threads = 1;
    parallel_for(seeds.size(), options.threads, [&](std::size_t s) {
        auto coarse = coarse_grain(output_distribution(u, seeds[s], inner), binning);
        sweep.mpb[s] = coarse.mpb;
        sweep.bin_probs[s] = std::move(coarse.probs);
    });
    return sweep;
}

std::vector<double> seed_averaged_bin_mass(const SeedSweep& sweep, const BinningScheme& binning,
                                           const SeedWeights& weights) {
    const std::size_t total = sweep.bin_probs.size();
    if (weights.weights() && weights.weights()->size() != total) {
        throw DomainError("seed_averaged_bin_mass: one weight per seed is required");
    }
    std::vector<double> mass(static_cast<std::size_t>(binning.bin_count()), 0.0);
    if (weights.is_uniform()) {
        for (const auto& probs : sweep.bin_probs) {
            for (std::size_t k = 0; k < mass.size(); ++k) {
                mass[k] += probs[k];
            }
        }
        for (double& m : mass) {
            m /= static_cast<double>(total);
        }
        return mass;
    }
    for (std::size_t s = 0; s < total; ++s) {
        const double w = weights.weight(s, total);
        if (w == 0.0) {
            continue;
        }
        for (std::size_t k = 0; k < mass.size(); ++k) {
            mass[k] += w * sweep.bin_probs[s][k];
        }
    }
    return mass;
}

std::vector<double> seed_averaged_bin_mass(const ModeUnitary& u, const BinningScheme& binning,
                                           const SeedWeights& weights,
                                           const SimulationOptions& options) {
    return seed_averaged_bin_mass(sweep_seeds(u, binning, options), binning, weights);
}

std::vector<std::uint64_t> mpb_label_counts(const SeedSweep& sweep, int d) {
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(d), 0);
    for (int label : sweep.mpb) {
        ++counts[static_cast<std::size_t>(label)];
    }
    return counts;
}

std::vector<double> mpb_label_frequency(const SeedSweep& sweep, int d) {
    const auto counts = mpb_label_counts(sweep, d);
    const auto total = static_cast<double>(sweep.mpb.size());
    std::vector<double> freq(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
        freq[k] = static_cast<double>(counts[k]) / total;
    }
    return freq;
}

std::vector<double> mpb_label_frequency(const ModeUnitary& u, const BinningScheme& binning,
                                        const SimulationOptions& options) {
    return mpb_label_frequency(sweep_seeds(u, binning, options), binning.bin_count());
}

double shannon_entropy(std::span<const double> p, EntropyUnit unit) {
    double h = 0.0;
    for (double x : p) {
        if (x < 0.0 || std::isnan(x)) {
            throw DomainError("shannon_entropy: negative probability");
        }
        if (x > 0.0) {
            h -= x * std::log2(x);
        }
    }
    if (unit == EntropyUnit::dits) {
        if (p.size() < 2) {
            throw DomainError("shannon_entropy: dits need at least two outcomes");
        }
        h /= std::log2(static_cast<double>(p.size()));
    }
    return h;
}

double entropy_gap_bound(const ConfigSpace& space, int d, EntropyUnit unit) {
    const double eps = epsilon_bound(space, d);
    if (eps > 0.25) {
        throw PreconditionError("entropy_gap_bound: epsilon = " + std::to_string(eps) +
                                " > 1/4, bound not claimed");
    }
    const double root = std::sqrt(space.size().convert_to<double>());
    const double bits = 2.0 * d / root;
    return unit == EntropyUnit::bits ? bits : bits * std::log2(static_cast<double>(d));
}

double entropy_continuity_bound(double distance, int d) {
    if (distance < 0.0 || distance > 0.25) {
        throw PreconditionError("entropy_continuity_bound: requires 0 <= D <= 1/4");
    }
    if (distance == 0.0) {
        return 0.0;
    }
    return -2.0 * distance * std::log2(2.0 * distance / d);
}

bool BoundChecks::all() const {
    auto ok = [](const std::optional<bool>& b) { return !b || *b; };
    return binmass_matches_sizes && distance_within_epsilon && ok(entropy_within_continuity) &&
           ok(entropy_within_bits_bound) && ok(entropy_within_dits_bound);
}

IndistinguishabilityReport verify_indistinguishability(const ModeUnitary& u,
                                                       const BinningScheme& binning,
                                                       const SimulationOptions& options) {
    const ConfigSpace& space = binning.space();
    const int d = binning.bin_count();
    const std::uint64_t total = space.checked_size();
    const auto sweep = sweep_seeds(u, binning, options);

    IndistinguishabilityReport r;
    r.modes = space.modes();
    r.photons = space.photons();
    r.bins = d;
    r.binning_mode = binning.mode();
    r.binning_seed = binning.seed();
    r.unitary_seed = u.source_seed();
    r.space_size = total;

    r.p_bs_binmass = seed_averaged_bin_mass(sweep, binning);
    r.p_mpb_freq = mpb_label_frequency(sweep, d);
    r.p_expected.resize(static_cast<std::size_t>(d));
    for (std::size_t k = 0; k < r.p_expected.size(); ++k) {
        r.p_expected[k] = static_cast<double>(binning.sizes()[k]) / static_cast<double>(total);
    }
    for (std::size_t k = 0; k < r.p_expected.size(); ++k) {
        r.binmass_residual =
            std::max(r.binmass_residual, std::abs(r.p_bs_binmass[k] - r.p_expected[k]));
    }

    const std::vector<double> uniform(static_cast<std::size_t>(d), 1.0 / d);
    r.distance_binmass = statistical_distance(r.p_bs_binmass, uniform);
    r.distance_mpb = statistical_distance(r.p_mpb_freq, uniform);
    r.epsilon = epsilon_bound(space, d);

    const double h_uni = std::log2(static_cast<double>(d));
    r.entropy_bits = shannon_entropy(r.p_bs_binmass, EntropyUnit::bits);
    r.entropy_gap_bits = std::abs(r.entropy_bits - h_uni);
    r.entropy_gap_dits = r.entropy_gap_bits / h_uni;
    r.entropy_gap_mpb_bits = std::abs(shannon_entropy(r.p_mpb_freq, EntropyUnit::bits) - h_uni);

    r.bounds_hold.binmass_matches_sizes = r.binmass_residual <= kIdentityTolerance;
    if (total % static_cast<std::uint64_t>(d) == 0) {
        r.bounds_hold.distance_within_epsilon = r.distance_binmass <= 1e-12;
    } else {
        r.bounds_hold.distance_within_epsilon = r.distance_binmass < r.epsilon;
    }

    if (r.epsilon <= 0.25) {
        r.entropy_bound_bits = entropy_gap_bound(space, d, EntropyUnit::bits);
        r.entropy_bound_dits = entropy_gap_bound(space, d, EntropyUnit::dits);
        r.bounds_hold.entropy_within_bits_bound =
            r.entropy_gap_bits <= *r.entropy_bound_bits + kEntropySlack;
        r.bounds_hold.entropy_within_dits_bound =
            r.entropy_gap_dits <= *r.entropy_bound_dits + kEntropySlack;
        if (r.distance_binmass <= 0.25) {
            r.continuity_bound_bits = entropy_continuity_bound(r.distance_binmass, d);
            r.bounds_hold.entropy_within_continuity =
                r.entropy_gap_bits <= *r.continuity_bound_bits + kEntropySlack;
        } else {
            r.bounds_hold.entropy_within_continuity = false;
        }
    }
    return r;
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json optional_json(const std::optional<bool>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return std::nullopt;
    }
    return j.at(key).get<T>();
}

} // namespace

nlohmann::json report_to_json(const IndistinguishabilityReport& r) {
    nlohmann::json params;
    params["modes"] = r.modes;
    params["photons"] = r.photons;
    params["bins"] = r.bins;
    params["binning_mode"] = std::string(to_string(r.binning_mode));
    params["binning_seed"] = r.binning_seed;
    params["unitary_seed"] =
        r.unitary_seed ? nlohmann::json(*r.unitary_seed) : nlohmann::json(nullptr);
    params["space_size"] = r.space_size;

    nlohmann::json bounds;
    bounds["binmass_matches_sizes"] = r.bounds_hold.binmass_matches_sizes;
    bounds["distance_within_epsilon"] = r.bounds_hold.distance_within_epsilon;
    bounds["entropy_within_continuity"] = optional_json(r.bounds_hold.entropy_within_continuity);
    bounds["entropy_within_bits_bound"] = optional_json(r.bounds_hold.entropy_within_bits_bound);
    bounds["entropy_within_dits_bound"] = optional_json(r.bounds_hold.entropy_within_dits_bound);
    bounds["all"] = r.bounds_hold.all();

    nlohmann::json j;
    j["params"] = std::move(params);
    j["p_bs_binmass"] = r.p_bs_binmass;
    j["p_mpb_freq"] = r.p_mpb_freq;
    j["p_expected"] = r.p_expected;
    j["binmass_residual"] = r.binmass_residual;
    j["distance_binmass"] = r.distance_binmass;
    j["distance_mpb"] = r.distance_mpb;
    j["epsilon"] = r.epsilon;
    j["entropy_bits"] = r.entropy_bits;
    j["entropy_gap_bits"] = r.entropy_gap_bits;
    j["entropy_gap_dits"] = r.entropy_gap_dits;
    j["entropy_gap_mpb_bits"] = r.entropy_gap_mpb_bits;
    j["continuity_bound_bits"] = optional_json(r.continuity_bound_bits);
    j["entropy_bound_bits"] = optional_json(r.entropy_bound_bits);
    j["entropy_bound_dits"] = optional_json(r.entropy_bound_dits);
    j["bounds_hold"] = std::move(bounds);
    return j;
}

IndistinguishabilityReport report_from_json(const nlohmann::json& j) {
    try {
        IndistinguishabilityReport r;
        const auto& params = j.at("params");
        r.modes = params.at("modes").get<int>();
        r.photons = params.at("photons").get<int>();
        r.bins = params.at("bins").get<int>();
        r.binning_mode = parse_binning_mode(params.at("binning_mode").get<std::string>());
        r.binning_seed = params.at("binning_seed").get<std::uint64_t>();
        r.unitary_seed = optional_from<std::uint64_t>(params, "unitary_seed");
        r.space_size = params.at("space_size").get<std::uint64_t>();

        r.p_bs_binmass = j.at("p_bs_binmass").get<std::vector<double>>();
        r.p_mpb_freq = j.at("p_mpb_freq").get<std::vector<double>>();
        r.p_expected = j.at("p_expected").get<std::vector<double>>();
        r.binmass_residual = j.at("binmass_residual").get<double>();
        r.distance_binmass = j.at("distance_binmass").get<double>();
        r.distance_mpb = j.at("distance_mpb").get<double>();
        r.epsilon = j.at("epsilon").get<double>();
        r.entropy_bits = j.at("entropy_bits").get<double>();
        r.entropy_gap_bits = j.at("entropy_gap_bits").get<double>();
        r.entropy_gap_dits = j.at("entropy_gap_dits").get<double>();
        r.entropy_gap_mpb_bits = j.at("entropy_gap_mpb_bits").get<double>();
        r.continuity_bound_bits = optional_from<double>(j, "continuity_bound_bits");
        r.entropy_bound_bits = optional_from<double>(j, "entropy_bound_bits");
        r.entropy_bound_dits = optional_from<double>(j, "entropy_bound_dits");

        const auto& bounds = j.at("bounds_hold");
        r.bounds_hold.binmass_matches_sizes = bounds.at("binmass_matches_sizes").get<bool>();
        r.bounds_hold.distance_within_epsilon = bounds.at("distance_within_epsilon").get<bool>();
        r.bounds_hold.entropy_within_continuity =
            optional_from<bool>(bounds, "entropy_within_continuity");
        r.bounds_hold.entropy_within_bits_bound =
            optional_from<bool>(bounds, "entropy_within_bits_bound");
        r.bounds_hold.entropy_within_dits_bound =
            optional_from<bool>(bounds, "entropy_within_dits_bound");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("report json: ") + e.what());
    }
}

void write_report_csv(std::ostream& out, const IndistinguishabilityReport& report) {
    out << "bin,p_bs_binmass,p_mpb_freq,p_uni\n";
    const double uniform = 1.0 / report.bins;
    for (std::size_t k = 0; k < report.p_bs_binmass.size(); ++k) {
        out << k << ',' << format_g17(report.p_bs_binmass[k]) << ','
            << format_g17(report.p_mpb_freq[k]) << ',' << format_g17(uniform) << '\n';
    }
}

} // namespace bosonkey
