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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bosonkey/analysis.hpp"
#include "bosonkey/bosonsim.hpp"
#include "bosonkey/errors.hpp"
#include "support.hpp"

namespace bosonkey {
namespace {

ModeUnitary beamsplitter() {
    const double h = 1 / std::sqrt(2.0);
    return ModeUnitary(ComplexMatrix(2, 2, {h, h, h, -h}));
}

// |sum over photon assignments|^2 with the factorials, written from scratch.
double independent_probability(const ModeUnitary& u, const BosonConfig& s, const BosonConfig& r) {
    const auto in = s.photon_modes();
    auto out = r.photon_modes();
    std::vector<int> perm(in.size());
    std::iota(perm.begin(), perm.end(), 0);
    Complex total = 0;
    do {
        Complex term = 1;
        for (std::size_t k = 0; k < in.size(); ++k) {
            term *= u(static_cast<std::size_t>(out[k]), static_cast<std::size_t>(in[perm[k]]));
        }
        total += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    double fact = 1;
    for (int m = 0; m < s.modes(); ++m) {
        for (int k = 2; k <= s[m]; ++k) fact *= k;
        for (int k = 2; k <= r[m]; ++k) fact *= k;
    }
    return std::norm(total) / fact;
}

TEST(Transition, IdentityUnitary) {
    const ModeUnitary id(ComplexMatrix::identity(3));
    const BosonConfig s({1, 0, 1});
    EXPECT_EQ(transition_probability(id, s, s), 1.0);
    EXPECT_EQ(transition_probability(id, s, BosonConfig({0, 1, 1})), 0.0);
    EXPECT_EQ(transition_probability(id, BosonConfig({2, 0, 0}), BosonConfig({2, 0, 0})), 1.0);
}

TEST(Transition, HongOuMandel) {
    const auto bs = beamsplitter();
    const BosonConfig s({1, 1});
    EXPECT_NEAR(transition_probability(bs, s, BosonConfig({1, 1})), 0.0, 1e-12);
    EXPECT_NEAR(transition_probability(bs, s, BosonConfig({2, 0})), 0.5, 1e-12);
    EXPECT_NEAR(transition_probability(bs, s, BosonConfig({0, 2})), 0.5, 1e-12);
    EXPECT_NEAR(transition_probability(bs, s, BosonConfig({2, 0}), PermanentMethod::naive), 0.5,
                1e-12);
}

TEST(Transition, NormalizedForHaarFourModes) {
    const auto u = haar_unitary(4, 3);
    const ConfigSpace space(4, 2);
    for (const auto& s : enumerate_configs(space)) {
        double total = 0;
        for (const auto& r : enumerate_configs(space)) {
            total += transition_probability(u, s, r);
        }
        EXPECT_NEAR(total, 1.0, 1e-9) << s.to_string();
    }
}

TEST(OutputDistribution, IdentityIsPointMass) {
    const ModeUnitary id(ComplexMatrix::identity(4));
    const ConfigSpace space(4, 2);
    const BosonConfig s({0, 1, 0, 1});
    const auto fine = output_distribution(id, s);
    for (std::size_t k = 0; k < fine.probs.size(); ++k) {
        EXPECT_EQ(fine.probs[k], k == rank_config(space, s) ? 1.0 : 0.0);
    }
}

TEST(OutputDistribution, PermutationUnitaryMovesTheAtom) {
    // mode i -> mode pi[i]
    const std::vector<int> pi{2, 0, 3, 1};
    ComplexMatrix p(4, 4);
    for (int i = 0; i < 4; ++i) {
        p(static_cast<std::size_t>(pi[i]), static_cast<std::size_t>(i)) = 1;
    }
    const ModeUnitary u(p);
    const BosonConfig s({2, 0, 1, 0});
    std::vector<int> moved(4, 0);
    for (int i = 0; i < 4; ++i) {
        moved[static_cast<std::size_t>(pi[i])] = s[static_cast<std::size_t>(i)];
    }
    const auto fine = output_distribution(u, s);
    const auto atom = rank_config(ConfigSpace(4, 3), BosonConfig(moved));
    for (std::size_t k = 0; k < fine.probs.size(); ++k) {
        EXPECT_NEAR(fine.probs[k], k == atom ? 1.0 : 0.0, 1e-15);
    }
}

TEST(OutputDistribution, MatchesIndependentEvaluation) {
    const auto u = haar_unitary(4, 42);
    const ConfigSpace space(4, 2);
    const auto all = enumerate_configs(space);
    for (const auto& s : all) {
        const auto fine = output_distribution(u, s);
        EXPECT_EQ(fine.unitary_seed, std::optional<std::uint64_t>(42));
        EXPECT_NEAR(testing::sum(fine.probs), 1.0, 1e-9);
        for (std::size_t k = 0; k < all.size(); ++k) {
            EXPECT_NEAR(fine.probs[k], independent_probability(u, s, all[k]), 1e-12);
        }
    }
}

TEST(OutputDistribution, RejectsModeMismatch) {
    EXPECT_THROW(output_distribution(haar_unitary(3, 1), BosonConfig({1, 1})), DomainError);
}

TEST(OutputDistribution, ThreadCountDoesNotChangeBits) {
    const auto u = haar_unitary(8, 17);
    const BosonConfig s({1, 0, 1, 0, 1, 0, 0, 0});
    SimulationOptions one, four;
    one.threads = 1;
    four.threads = 4;
    EXPECT_EQ(output_distribution(u, s, one).probs, output_distribution(u, s, four).probs);
}

TEST(OutputDistribution, LiteralAbsLawIsRenormalized) {
    SimulationOptions opts;
    opts.law = ProbabilityLaw::literal_abs;
    const auto fine = output_distribution(haar_unitary(5, 2), BosonConfig({1, 1, 0, 0, 1}), opts);
    EXPECT_NEAR(testing::sum(fine.probs), 1.0, 1e-12);
}

TEST(BosonsimProperty, NormalizationOverRandomPairs) {
    Rng rng(4242);
    for (int t = 0; t < 200; ++t) {
        const int m = 2 + static_cast<int>(rng.uniform_below(5));
        const int n = 1 + static_cast<int>(rng.uniform_below(3));
        const auto u = haar_unitary(m, rng.next_u64());
        const auto s = testing::random_config(m, n, rng);
        ASSERT_NEAR(testing::sum(output_distribution(u, s).probs), 1.0, 1e-9);
    }
}

TEST(BosonsimProperty, ColumnStochastic) {
    for (auto [m, n] : {std::pair{3, 2}, std::pair{4, 3}, std::pair{6, 2}}) {
        const auto u = haar_unitary(m, 600 + m);
        const ConfigSpace space(m, n);
        const auto all = enumerate_configs(space);
        std::vector<double> column(all.size(), 0.0);
        for (const auto& s : all) {
            const auto fine = output_distribution(u, s);
            for (std::size_t r = 0; r < all.size(); ++r) {
                column[r] += fine.probs[r];
            }
        }
        for (double c : column) {
            ASSERT_NEAR(c, 1.0, 1e-9);
        }
    }
}

TEST(Coarse, IdentityBinningEqualsFine) {
    const auto u = haar_unitary(4, 11);
    const auto fine = output_distribution(u, BosonConfig({1, 0, 0, 1}));
    const auto coarse = coarse_grain(fine, make_binning(fine.space, 10));
    EXPECT_EQ(coarse.probs, fine.probs);
    EXPECT_EQ(coarse.mpb, argmax_smallest(fine.probs));
    EXPECT_EQ(coarse.mpb_prob, fine.probs[static_cast<std::size_t>(coarse.mpb)]);
}

TEST(Coarse, PointMassLandsInItsBin) {
    const ModeUnitary id(ComplexMatrix::identity(4));
    const ConfigSpace space(4, 2);
    const auto binning = make_binning(space, 2);
    for (const auto& s : enumerate_configs(space)) {
        EXPECT_EQ(most_probable_bin(id, s, binning), binning.label_of(rank_config(space, s)));
    }
}

TEST(Coarse, HongOuMandelTieBreaksLow) {
    const auto fine = output_distribution(beamsplitter(), BosonConfig({1, 1}));
    const auto coarse = coarse_grain(fine, make_binning(fine.space, 3));
    ASSERT_EQ(coarse.probs.size(), 3u);
    EXPECT_NEAR(coarse.probs[0], 0.5, 1e-12);
    EXPECT_NEAR(coarse.probs[1], 0.0, 1e-12);
    EXPECT_NEAR(coarse.probs[2], 0.5, 1e-12);
    EXPECT_EQ(coarse.mpb, 0);
}

TEST(Coarse, ArgmaxTies) {
    EXPECT_EQ(argmax_smallest(std::vector<double>{0.2, 0.4, 0.4}), 1);
    EXPECT_EQ(argmax_smallest(std::vector<double>{0.25, 0.25, 0.25, 0.25}), 0);
    EXPECT_THROW(argmax_smallest(std::vector<double>{}), DomainError);
}

TEST(Coarse, RejectsForeignBinning) {
    const auto fine = output_distribution(haar_unitary(4, 1), BosonConfig({1, 1, 0, 0}));
    EXPECT_THROW(coarse_grain(fine, make_binning(ConfigSpace(4, 3), 4)), DomainError);
}

TEST(MostProbableBin, FrozenFourModeTable) {
    // Brute-force table from tests/oracles/mpb_fixtures.py.
    const std::vector<int> expected{3, 4, 4, 1, 2, 3, 0, 1, 0, 0};
    const auto u = haar_unitary(4, 42);
    const ConfigSpace space(4, 2);
    const auto binning = make_binning(space, 5);
    for (std::uint64_t k = 0; k < 10; ++k) {
        EXPECT_EQ(most_probable_bin(u, unrank_config(space, k), binning), expected[k]) << k;
    }
}

TEST(MostProbableBin, Deterministic) {
    const auto u = haar_unitary(6, 2);
    const auto binning = make_binning(ConfigSpace(6, 3), 7, BinningMode::permuted, 3);
    const BosonConfig s({1, 0, 2, 0, 0, 0});
    EXPECT_EQ(most_probable_bin(u, s, binning), most_probable_bin(u, s, binning));
}

TEST(BosonsimProperty, CoarseGrainPreservesMass) {
    Rng rng(8);
    for (int t = 0; t < 50; ++t) {
        const auto u = haar_unitary(6, rng.next_u64());
        const auto s = testing::random_config(6, 3, rng);
        const auto fine = output_distribution(u, s);
        const int d = 2 + static_cast<int>(rng.uniform_below(40));
        const auto coarse = coarse_grain(fine, make_binning(fine.space, d, BinningMode::permuted, t));
        ASSERT_NEAR(testing::sum(coarse.probs), testing::sum(fine.probs), 1e-15);
    }
}

TEST(BosonsimProperty, MpbIsScaleInvariant) {
    Rng rng(12);
    for (int t = 0; t < 100; ++t) {
        const auto u = haar_unitary(5, rng.next_u64());
        const auto fine = output_distribution(u, testing::random_config(5, 3, rng));
        const auto binning = make_binning(fine.space, 2 + static_cast<int>(rng.uniform_below(20)));
        const double c = 0.01 + 100 * rng.uniform01();
        FineDistribution scaled = fine;
        for (double& p : scaled.probs) {
            p *= c;
        }
        const double total = testing::sum(scaled.probs);
        for (double& p : scaled.probs) {
            p /= total;
        }
        ASSERT_EQ(coarse_grain(scaled, binning).mpb, coarse_grain(fine, binning).mpb);
    }
}

TEST(SampleBin, PointMass) {
    const auto fine = output_distribution(ModeUnitary(ComplexMatrix::identity(3)), BosonConfig({0, 1, 1}));
    const auto coarse = coarse_grain(fine, make_binning(fine.space, 3));
    for (int label : sample_bin(coarse, 1, 1000)) {
        ASSERT_EQ(label, coarse.mpb);
    }
    EXPECT_THROW(sample_bin(coarse, 1, 0), DomainError);
}

TEST(SampleBin, UniformFrequencies) {
    const auto fine = output_distribution(ModeUnitary(ComplexMatrix::identity(4)), BosonConfig({1, 0, 0, 0}));
    auto coarse = coarse_grain(fine, make_binning(fine.space, 4));
    coarse.probs = {0.25, 0.25, 0.25, 0.25};
    const auto draws = sample_bin(coarse, 2026, 100'000);
    std::vector<int> counts(4, 0);
    for (int l : draws) {
        ++counts[static_cast<std::size_t>(l)];
    }
    for (int c : counts) {
        EXPECT_NEAR(c / 100'000.0, 0.25, 0.01);
    }
    EXPECT_EQ(sample_bin(coarse, 2026, 50), sample_bin(coarse, 2026, 50));
}

TEST(Induced, SinglePhotonIsTheUnitary) {
    const auto u = haar_unitary(2, 21);
    EXPECT_LE(max_abs_diff(induced_nboson_unitary(u, ConfigSpace(2, 1)), u.matrix()), 1e-15);
    const auto u5 = haar_unitary(5, 22);
    EXPECT_LE(max_abs_diff(induced_nboson_unitary(u5, ConfigSpace(5, 1)), u5.matrix()), 1e-15);
}

TEST(Induced, IdentityMapsToIdentity) {
    const ModeUnitary id(ComplexMatrix::identity(4));
    const auto v = induced_nboson_unitary(id, ConfigSpace(4, 3));
    EXPECT_LE(max_abs_diff(v, ComplexMatrix::identity(20)), 1e-15);
}

TEST(Induced, ThreeModesTwoPhotonsIsUnitary) {
    const auto v = induced_nboson_unitary(haar_unitary(3, 5), ConfigSpace(3, 2));
    EXPECT_LE(unitarity_defect(v), 1e-8);
}

TEST(Induced, RejectsOversizedOrMismatched) {
    EXPECT_THROW(induced_nboson_unitary(haar_unitary(3, 5), ConfigSpace(4, 2)), DomainError);
    EXPECT_THROW(induced_nboson_unitary(haar_unitary(12, 5), ConfigSpace(12, 5)), ResourceError);
}

TEST(BosonsimProperty, InducedIsUnitaryAndHomomorphic) {
    Rng rng(314);
    for (int t = 0; t < 20; ++t) {
        const int m = 2 + static_cast<int>(rng.uniform_below(4));
        const int n = 1 + static_cast<int>(rng.uniform_below(3));
        const ConfigSpace space(m, n);
        const auto a = haar_unitary(m, rng.next_u64());
        const auto b = haar_unitary(m, rng.next_u64());
        const auto va = induced_nboson_unitary(a, space);
        const auto vb = induced_nboson_unitary(b, space);
        ASSERT_LE(unitarity_defect(va), 1e-8);
        const ModeUnitary ab(a.matrix() * b.matrix());
        ASSERT_LE(max_abs_diff(induced_nboson_unitary(ab, space), va * vb), 1e-10);
    }
}

TEST(Csv, FineAndCoarseLayout) {
    const auto fine = output_distribution(beamsplitter(), BosonConfig({1, 1}));
    std::ostringstream f;
    write_fine_csv(f, fine);
    const auto fs = f.str();
    EXPECT_EQ(fs.substr(0, 17), "rank,probability\n");
    EXPECT_EQ(std::count(fs.begin(), fs.end(), '\n'), 4);

    const auto coarse = coarse_grain(fine, make_binning(fine.space, 2));
    std::ostringstream c;
    write_coarse_csv(c, coarse);
    const auto cs = c.str();
    EXPECT_EQ(cs.substr(0, 16), "bin,probability\n");
    EXPECT_EQ(std::count(cs.begin(), cs.end(), '\n'), 3);
    EXPECT_EQ(format_g17(0.1), "0.10000000000000001");
}

TEST(OccupationFactorial, Product) {
    EXPECT_EQ(occupation_factorial(BosonConfig({3, 0, 2})), 12.0);
    EXPECT_EQ(occupation_factorial(BosonConfig({1, 1, 1})), 1.0);
}

} // namespace
} // namespace bosonkey
