#include <realism/typicality.hpp>

#include <gtest/gtest.h>

using namespace realism;

namespace {
const Alphabet kBin = binary_alphabet();
}

TEST(WeakTypicality, FairCoinDeviationIsExactlyZero) {
    const auto p = Model::bernoulli(0.5);
    for (std::size_t n = 1; n <= 16; ++n)
        for_each_sequence(kBin, n, [&](const Sequence& x) {
            const auto r = weak_typicality(p, x, 1e-3);
            ASSERT_EQ(r.deviation, 0.0);
            ASSERT_TRUE(r.member);
        });
}

TEST(WeakTypicality, BiasedCoinAllZeros) {
    const auto p = Model::bernoulli(0.8);
    const double h = 0.8 * std::log(1 / 0.8) + 0.2 * std::log(1 / 0.2);
    const auto r = weak_typicality(p, constant_sequence(kBin, 0, 40), 0.1);
    EXPECT_NEAR(r.per_symbol_neg_log_prob, std::log(5.0), 1e-12);
    EXPECT_NEAR(r.deviation, std::abs(std::log(5.0) - h), 1e-12);
    EXPECT_FALSE(r.member);
}

TEST(WeakTypicality, AepConcentration) {
    const auto p = Model::bernoulli(0.8);
    const auto r = weak_typicality(p, sample(p, 10000, 3), 0.02);
    EXPECT_LT(r.deviation, 0.02);
    EXPECT_TRUE(r.member);
}

TEST(WeakTypicality, BoundaryExcluded) {
    const auto p = Model::bernoulli(0.8);
    const auto x = constant_sequence(kBin, 0, 4);
    const double dev = weak_typicality(p, x, 1.0).deviation;
    EXPECT_FALSE(weak_typicality(p, x, dev).member);
    EXPECT_THROW(weak_typicality(p, x, 0.0), config_error);
    EXPECT_THROW(weak_typicality(Model::constant(kBin, 0), x, 0.1), unsupported_error);
}

TEST(StrongTypicality, SingleSymbolReducesToProbability) {
    const std::vector<double> probs{0.1, 0.25, 0.05, 0.6};
    const auto p = Model::iid(Alphabet(4), probs);
    for (Symbol s = 0; s < 4; ++s)
        EXPECT_NEAR(strong_typicality_distance(p, Sequence(Alphabet(4), {s})), 2.0 - 2.0 * probs[s], 1e-12);
}

TEST(StrongTypicality, ExactFrequenciesAndAllZeros) {
    const auto p = Model::bernoulli(0.25);
    EXPECT_NEAR(strong_typicality_distance(p, parse_sequence("0010", kBin)), 0.0, 1e-15);
    const auto fair = Model::bernoulli(0.5);
    for (std::size_t n : {1u, 7u, 100u}) EXPECT_DOUBLE_EQ(strong_typicality_distance(fair, constant_sequence(kBin, 0, n)), 1.0);
    EXPECT_THROW(strong_typicality_distance(Model::markov(kBin, {{0.5, 0.5}, {0.5, 0.5}}), parse_sequence("01", kBin)),
                 unsupported_error);
}

TEST(StrongTypicality, RangeZeroToTwo) {
    const auto p = Model::bernoulli(0.3);
    for_each_sequence(kBin, 8, [&](const Sequence& x) {
        const double d = strong_typicality_distance(p, x);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 2.0);
    });
}

TEST(TypicalSet, FairCoinContainsEverySequence) {
    const auto c = enumerate_typical_set(Model::bernoulli(0.5), 10, 0.01);
    EXPECT_EQ(c.count, 1024u);
    EXPECT_EQ(c.total, 1024u);
}

TEST(TypicalSet, CountMatchesBinomialOracleAndBound) {
    const double p = 0.9, delta = 0.05;
    const std::size_t n = 12;
    const double h = -p * std::log(p) - (1 - p) * std::log(1 - p);
    // Oracle: group sequences by the number of ones.
    std::uint64_t oracle = 0;
    double binom = 1.0;
    for (std::size_t k = 0; k <= n; ++k) {
        if (k > 0) binom = binom * static_cast<double>(n - k + 1) / static_cast<double>(k);
        const double rate = -(k * std::log(p) + (n - k) * std::log(1 - p)) / static_cast<double>(n);
        if (std::abs(rate - h) < delta) oracle += static_cast<std::uint64_t>(std::llround(binom));
    }
    const auto c = enumerate_typical_set(Model::bernoulli(p), n, delta);
    EXPECT_EQ(c.count, oracle);
    EXPECT_LE(static_cast<double>(c.count), std::exp2(n * h / kLn2 + n * delta / kLn2));
}

TEST(TypicalSet, CountNonDecreasingInDelta) {
    const auto p = Model::bernoulli(0.7);
    std::uint64_t prev = 0;
    for (double d : {0.01, 0.02, 0.05, 0.1, 0.2, 0.5}) {
        const auto c = enumerate_typical_set(p, 14, d);
        EXPECT_GE(c.count, prev);
        prev = c.count;
    }
}

TEST(TypicalSet, ParallelCountEqualsSerial) {
    const auto p = Model::markov(kBin, {{0.7, 0.3}, {0.2, 0.8}});
    for (double d : {0.02, 0.1})
        EXPECT_EQ(enumerate_typical_set(p, 16, d, 1).count, enumerate_typical_set(p, 16, d, 5).count);
}

TEST(TypicalSet, BudgetExceeded) {
    EXPECT_THROW(enumerate_typical_set(Model::bernoulli(0.5), 25, 0.1), budget_error);
    EXPECT_THROW(enumerate_typical_set(Model::uniform(byte_alphabet()), 4, 0.1), budget_error);
}

TEST(TypicalSet, MembershipProbabilityAtDeskScale) {
    const auto p = Model::bernoulli(0.8);
    const double mean = entropy_rate(p);
    const double var = 0.8 * std::pow(std::log(0.8), 2) + 0.2 * std::pow(std::log(0.2), 2) - mean * mean;
    const std::size_t n = 10000;
    const double delta = 3 * std::sqrt(var) / std::sqrt(static_cast<double>(n));
    EXPECT_GE(typical_membership_rate(p, n, delta, 2000, 13, 4), 0.9);
}

TEST(Enumeration, NthSequenceIsLexicographic) {
    EXPECT_EQ(nth_sequence(kBin, 4, 5), parse_sequence("0101", kBin));
    EXPECT_EQ(nth_sequence(Alphabet(3), 2, 7), Sequence(Alphabet(3), {2, 1}));
    std::uint64_t i = 0;
    for_each_sequence(Alphabet(3), 3, [&](const Sequence& x) { EXPECT_EQ(x, nth_sequence(Alphabet(3), 3, i++)); });
    EXPECT_EQ(i, 27u);
}
