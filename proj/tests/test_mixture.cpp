#include <realism/mixture.hpp>
#include <realism/typicality.hpp>

#include <gtest/gtest.h>

using namespace realism;

namespace {

const Alphabet kBin = binary_alphabet();

// Linear-space oracle: sum_n pi_n prod_b Q_n(x_b).
double linear_batch_prob(const Mixture& s, std::span<const Sequence> batch) {
    double total = 0.0;
    for (const auto& c : s.components()) {
        double term = std::exp(c.log_prior);
        for (const auto& x : batch) term *= std::exp(log_prob(c.model, x));
        total += term;
    }
    return total;
}

}  // namespace

TEST(Prior, EqualBitsNormalized) {
    const auto s = prior_from_description_bits({Model::bernoulli(0.5, 1), Model::bernoulli(0.8, 1)});
    EXPECT_NEAR(std::exp(s[0].log_prior), 0.5, 1e-15);
    EXPECT_NEAR(std::exp(s[1].log_prior), 0.5, 1e-15);
    EXPECT_EQ(s.normalization(), Normalization::normalized);
}

TEST(Prior, SemimeasureTotalPreserved) {
    const auto s = prior_from_description_bits(
        {Model::bernoulli(0.5, 2), Model::bernoulli(0.8, 2), Model::constant(kBin, 0, 3)});
    EXPECT_NEAR(std::exp(s[0].log_prior), 0.25, 1e-15);
    EXPECT_NEAR(std::exp(s[2].log_prior), 0.125, 1e-15);
    EXPECT_EQ(s.normalization(), Normalization::semimeasure);
    EXPECT_NEAR(s.total_prior(), 0.625, 1e-15);
}

TEST(Prior, MassAboveOneRejected) {
    EXPECT_THROW(prior_from_description_bits({Model::bernoulli(0.5, 0), Model::bernoulli(0.8, 1)}), config_error);
}

TEST(Mixture, RejectsEmptyAndMixedAlphabets) {
    EXPECT_THROW(Mixture({}), config_error);
    EXPECT_THROW(prior_from_description_bits({Model::bernoulli(0.5, 2), Model::uniform(Alphabet(3), 2)}), config_error);
}

TEST(LogMixProb, SingleComponent) {
    const auto s = prior_from_description_bits({Model::bernoulli(0.7, 3)});
    const auto x = parse_sequence("0110", kBin);
    EXPECT_NEAR(log_mix_prob(s, x), -3 * kLn2 + log_prob(Model::bernoulli(0.7), x), 1e-14);
}

TEST(LogMixProb, CheapConstantDominatesAllZeros) {
    const auto s = prior_from_description_bits({Model::constant(kBin, 0, 8), Model::bernoulli(0.5, 1)});
    const auto x = constant_sequence(kBin, 0, 128);
    const double oracle = std::log(std::exp2(-8.0) + std::exp2(-129.0));
    EXPECT_NEAR(log_mix_prob(s, x), oracle, 1e-12);
    EXPECT_NEAR(log_mix_prob(s, x), -8 * kLn2, 1e-9);
}

TEST(LogMixProb, AllZeroIsMinusInfinity) {
    const auto s = prior_from_description_bits({Model::constant(kBin, 0, 1), Model::constant(kBin, 1, 1)});
    EXPECT_EQ(log_mix_prob(s, parse_sequence("01", kBin)), -kInf);
}

TEST(LogMixProb, AtLeastEveryWeightedTerm) {
    const auto s = default_zoo_mixture(kBin);
    Rng rng(4);
    for (int i = 0; i < 1000; ++i) {
        const auto x = sample(Model::bernoulli(uniform01(rng)), 1 + uniform_index(rng, 30), derive_seed(4, 0, i));
        const double lm = log_mix_prob(s, x);
        for (const auto& c : s.components()) EXPECT_GE(lm, c.log_prior + log_prob(c.model, x) - 1e-12);
    }
}

TEST(Dominance, ExhaustiveOverShortBinarySequences) {
    const auto s = default_zoo_mixture(kBin);
    for (std::size_t n = 1; n <= 12; ++n) {
        std::size_t violations = 0;
        for_each_sequence(kBin, n, [&](const Sequence& x) {
            const double lm = log_mix_prob(s, x);
            for (const auto& c : s.components())
                if (lm - c.log_prior - log_prob(c.model, x) < -1e-12) ++violations;
        });
        EXPECT_EQ(violations, 0u) << "N=" << n;
    }
}

TEST(BatchLogMixProb, BatchOfOneEqualsSingle) {
    const auto s = default_zoo_mixture(kBin);
    const auto x = parse_sequence("0010110", kBin);
    const std::vector<Sequence> b{x};
    EXPECT_DOUBLE_EQ(batch_log_mix_prob(s, b), log_mix_prob(s, x));
    EXPECT_THROW(batch_log_mix_prob(s, std::span<const Sequence>{}), input_error);
}

TEST(BatchLogMixProb, OnlySupportingComponentSurvives) {
    const auto q = Model::bernoulli(0.3);
    const auto s = prior_from_description_bits({Model::bernoulli(0.3, 2), Model::constant(kBin, 1, 2)});
    const std::vector<Sequence> b{parse_sequence("0101", kBin), parse_sequence("1110", kBin)};
    EXPECT_NEAR(batch_log_mix_prob(s, b), -2 * kLn2 + log_prob(q, b[0]) + log_prob(q, b[1]), 1e-13);
}

TEST(BatchLogMixProb, MatchesLinearSpaceOracle) {
    const auto s = prior_from_description_bits({Model::bernoulli(0.3, 1), Model::markov(kBin, {{0.9, 0.1}, {0.2, 0.8}}, {}, 2)});
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t bsz = 1 + uniform_index(rng, 4);
        std::vector<Sequence> b;
        for (std::size_t i = 0; i < bsz; ++i)
            b.push_back(sample(Model::bernoulli(0.5), 1 + uniform_index(rng, 5), derive_seed(8, trial, i)));
        EXPECT_NEAR(batch_log_mix_prob(s, b), std::log(linear_batch_prob(s, b)), 1e-10);
        double sum_single = 0.0;
        for (const auto& x : b) sum_single += log_mix_prob(s, x);
        if (bsz > 1) {
            EXPECT_NE(batch_log_mix_prob(s, b), sum_single);
        }
    }
}

TEST(Posterior, EmptyBatchGivesNormalizedPrior) {
    const auto s = prior_from_description_bits({Model::bernoulli(0.5, 2), Model::bernoulli(0.8, 3)});
    const auto w = posterior(s, std::span<const Sequence>{}).weights();
    EXPECT_NEAR(w[0], 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(w[1], 1.0 / 3.0, 1e-15);
}

TEST(Posterior, DisjointSupports) {
    const auto s = prior_from_description_bits({Model::constant(kBin, 0, 1), Model::constant(kBin, 1, 1)});
    const std::vector<Sequence> b{constant_sequence(kBin, 0, 10)};
    const auto w = posterior(s, b).weights();
    EXPECT_EQ(w[0], 1.0);
    EXPECT_EQ(w[1], 0.0);
    const std::vector<Sequence> bad{parse_sequence("01", kBin)};
    EXPECT_THROW(posterior(s, bad), input_error);
}

TEST(Posterior, ConcentratesOnTheTrueBias) {
    const auto s = prior_from_description_bits({Model::bernoulli(0.5, 1), Model::bernoulli(0.8, 1)});
    const auto draw = sample(Model::bernoulli(0.8), 50, 7);
    std::vector<Sequence> b;
    int ones = 0;
    for (Symbol x : draw.symbols()) {
        b.push_back(Sequence(kBin, {x}));
        ones += x == 1;
    }
    const auto w = posterior(s, b).weights();
    // Equal priors: the weight is a likelihood ratio in the number of ones.
    const double log_ratio = 50 * std::log(0.5) - ones * std::log(0.8) - (50 - ones) * std::log(0.2);
    EXPECT_NEAR(w[1], 1.0 / (1.0 + std::exp(log_ratio)), 1e-12);
    EXPECT_GT(w[1], 0.99);
}

TEST(Posterior, WeightsSumToOne) {
    const auto s = default_zoo_mixture(kBin);
    Rng rng(12);
    for (int i = 0; i < 50; ++i) {
        std::vector<Sequence> b;
        for (int j = 0; j < 3; ++j) b.push_back(sample(Model::bernoulli(uniform01(rng)), 16, derive_seed(12, i, j)));
        double total = 0.0;
        for (double w : posterior(s, b).weights()) total += w;
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(DefaultZoo, DocumentedComposition) {
    const auto zoo = default_zoo(kBin);
    // uniform + 2 constants + primitive binary patterns of period 2..4 (2 + 6 + 12) + 81 Markov.
    EXPECT_EQ(zoo.size(), 1u + 2u + 20u + 81u);
    const auto s = prior_from_description_bits(zoo);
    EXPECT_LT(s.total_prior(), 1.0);
    EXPECT_EQ(s[0].model.name(), "uniform");
    EXPECT_DOUBLE_EQ(zoo[1].description_bits(), 4.0);
    EXPECT_NO_THROW(default_zoo_mixture(Alphabet(3)));
    EXPECT_NO_THROW(default_zoo_mixture(byte_alphabet()));
}

TEST(PrimitivePattern, Detection) {
    EXPECT_TRUE(is_primitive_pattern(std::vector<Symbol>{0, 1}));
    EXPECT_FALSE(is_primitive_pattern(std::vector<Symbol>{0, 1, 0, 1}));
    EXPECT_FALSE(is_primitive_pattern(std::vector<Symbol>{1, 1}));
    EXPECT_TRUE(is_primitive_pattern(std::vector<Symbol>{0, 0, 1}));
}
