#include <realism/divergence.hpp>

#include <gtest/gtest.h>

using namespace realism;

namespace {

const Alphabet kBin = binary_alphabet();
const double kBernKl = 0.8 * std::log(1.6) + 0.2 * std::log(0.4);

double brute_kl(const Model& q, const Model& p, std::size_t n) {
    double kl = 0.0;
    for_each_sequence(q.alphabet(), n, [&](const Sequence& x) {
        const double lq = log_prob(q, x);
        if (lq == -kInf) return;
        kl += std::exp(lq) * (lq - log_prob(p, x));
    });
    return kl;
}

}  // namespace

TEST(KlExact, SelfIsZero) {
    const auto m = Model::markov(kBin, {{0.6, 0.4}, {0.3, 0.7}});
    EXPECT_NEAR(kl_exact(m, m, 9), 0.0, 1e-15);
    EXPECT_EQ(kl_exact(Model::bernoulli(0.3), Model::bernoulli(0.3), 5), 0.0);
}

TEST(KlExact, BernoulliClosedForm) {
    EXPECT_NEAR(kl_exact(Model::bernoulli(0.8), Model::bernoulli(0.5), 1), kBernKl, 1e-15);
    EXPECT_NEAR(kBernKl, 0.1927, 1e-4);
    EXPECT_NEAR(kl_exact(Model::bernoulli(0.8), Model::bernoulli(0.5), 20), 20 * kBernKl, 1e-12);
}

TEST(KlExact, ConstantAgainstFairCoin) {
    EXPECT_NEAR(kl_exact(Model::constant(kBin, 0), Model::bernoulli(0.5), 10), 10 * std::log(2.0), 1e-12);
}

TEST(KlExact, AbsoluteContinuityViolationIsInfinite) {
    EXPECT_EQ(kl_exact(Model::bernoulli(0.5), Model::constant(kBin, 0), 3), kInf);
    EXPECT_EQ(kl_exact(Model::bernoulli(0.5), Model::periodic(kBin, {0, 1}), 3), kInf);
}

TEST(KlExact, AgreesWithEnumeration) {
    Rng rng(3);
    auto row = [&] {
        const double a = 0.05 + 0.9 * uniform01(rng);
        return std::vector<double>{a, 1 - a};
    };
    for (int t = 0; t < 20; ++t) {
        const auto q = Model::markov(kBin, {row(), row()}, row());
        const auto p = t % 2 ? Model::markov(kBin, {row(), row()}, row()) : Model::iid(kBin, row());
        for (std::size_t n : {1u, 4u, 12u}) EXPECT_NEAR(kl_exact(q, p, n), brute_kl(q, p, n), 1e-10);
    }
    const auto mem = Model::memorized(kBin, {parse_sequence("0110", kBin), parse_sequence("1111", kBin)});
    EXPECT_NEAR(kl_exact(mem, Model::bernoulli(0.5), 4), brute_kl(mem, Model::bernoulli(0.5), 4), 1e-12);
}

TEST(KlRate, StationaryMarkovRate) {
    const auto q = Model::markov(kBin, {{0.9, 0.1}, {0.3, 0.7}});
    const auto p = Model::bernoulli(0.5);
    const double pi0 = 0.3 / 0.4, pi1 = 0.1 / 0.4;
    auto row_kl = [](double a) { return a * std::log(a / 0.5) + (1 - a) * std::log((1 - a) / 0.5); };
    EXPECT_NEAR(kl_rate(q, p), pi0 * row_kl(0.9) + pi1 * row_kl(0.7), 1e-10);
    // With the chain started from its stationary law, the finite-N KL is
    // initial KL + (N - 1) * rate.
    const auto qs = Model::markov(kBin, {{0.9, 0.1}, {0.3, 0.7}}, {pi0, pi1});
    EXPECT_NEAR(kl_exact(qs, p, 50), row_kl(pi0) + 49 * kl_rate(q, p), 1e-9);
    EXPECT_NEAR(kl_rate(Model::bernoulli(0.8), p), kBernKl, 1e-15);
}

TEST(TvExact, Examples) {
    const auto q = Model::bernoulli(0.8), p = Model::bernoulli(0.5);
    const auto same = tv_exact(p, p, 6);
    EXPECT_NEAR(same.tv, 0.0, 1e-15);
    EXPECT_NEAR(same.p_success, 0.5, 1e-15);
    const auto disjoint = tv_exact(Model::constant(kBin, 0), Model::constant(kBin, 1), 4);
    EXPECT_DOUBLE_EQ(disjoint.tv, 1.0);
    EXPECT_DOUBLE_EQ(disjoint.p_success, 1.0);
    const auto r = tv_exact(q, p, 1);
    EXPECT_NEAR(r.tv, 0.3, 1e-15);
    EXPECT_NEAR(r.p_success, 0.65, 1e-15);
    EXPECT_THROW(tv_exact(q, p, 30), budget_error);
}

TEST(TvExact, AgreesWithBinomialOracle) {
    const double a = 0.7, b = 0.4;
    const std::size_t n = 12;
    double tv = 0.0, binom = 1.0;
    for (std::size_t k = 0; k <= n; ++k) {
        if (k > 0) binom = binom * static_cast<double>(n - k + 1) / static_cast<double>(k);
        tv += binom * std::abs(std::pow(a, k) * std::pow(1 - a, n - k) - std::pow(b, k) * std::pow(1 - b, n - k));
    }
    EXPECT_NEAR(tv_exact(Model::bernoulli(a), Model::bernoulli(b), n).tv, tv / 2, 1e-12);
}

TEST(OptimalCritic, Values) {
    const auto q = Model::bernoulli(0.8), p = Model::bernoulli(0.5);
    const auto t = optimal_critic(q, p);
    EXPECT_NEAR(t(parse_sequence("1", kBin)), std::log(1.6) + 1.0, 1e-15);
    const auto self = optimal_critic(p, p);
    EXPECT_DOUBLE_EQ(self(parse_sequence("0110", kBin)), 1.0);
    const auto inf = optimal_critic(Model::bernoulli(0.5), Model::constant(kBin, 0));
    EXPECT_EQ(inf(parse_sequence("1", kBin)), kInf);
    const auto ninf = optimal_critic(Model::constant(kBin, 0), Model::bernoulli(0.5));
    EXPECT_EQ(ninf(parse_sequence("1", kBin)), -kInf);
}

TEST(FDivBound, ConstantCriticGivesZero) {
    const auto q = Model::bernoulli(0.8), p = Model::bernoulli(0.5);
    EXPECT_NEAR(f_div_bound([](const Sequence&) { return 1.0; }, q, p, 6), 0.0, 1e-13);
}

TEST(FDivBound, OptimalCriticIsTight) {
    const auto q = Model::bernoulli(0.8), p = Model::bernoulli(0.5);
    for (std::size_t n = 1; n <= 8; ++n)
        EXPECT_NEAR(f_div_bound(optimal_critic(q, p), q, p, n), kl_exact(q, p, n), 1e-12) << n;
}

TEST(FDivBound, PerturbedCriticsAreStrictlyLower) {
    const auto q = Model::markov(kBin, {{0.7, 0.3}, {0.2, 0.8}}), p = Model::bernoulli(0.5);
    const auto opt = optimal_critic(q, p);
    const double kl = kl_exact(q, p, 6);
    for (int t = 0; t < 100; ++t) {
        const std::uint64_t seed = derive_seed(55, t);
        const ScoreFunction noisy = [&, seed](const Sequence& x) {
            std::uint64_t h = seed;
            for (Symbol s : x.symbols()) h = mix_seed(h ^ (s + 1));
            Rng r(h);
            return opt(x) + 0.1 * standard_normal(r);
        };
        EXPECT_LT(f_div_bound(noisy, q, p, 6), kl);
    }
}

TEST(FDivBound, OverflowIsVacuous) {
    const auto q = Model::bernoulli(0.8), p = Model::bernoulli(0.5);
    EXPECT_EQ(f_div_bound([](const Sequence&) { return 1e6; }, q, p, 3), -kInf);
}

TEST(Mmd, IdenticalSetsVanish) {
    std::vector<Sequence> xs;
    for (int i = 0; i < 20; ++i) xs.push_back(sample(Model::bernoulli(0.5), 30, derive_seed(1, i)));
    for (unsigned k = 1; k <= 3; ++k) EXPECT_NEAR(mmd2(xs, xs, FeatureMap::kgram(k)), 0.0, 1e-15);
    const std::vector<Sequence> one{xs[0]};
    EXPECT_EQ(mmd2(one, one, FeatureMap::symbol_histogram()), 0.0);
}

TEST(Mmd, BernoulliHistogramDifference) {
    const std::size_t m = 1000, n = 16;
    std::vector<Sequence> xs, ys;
    for (std::size_t i = 0; i < m; ++i) {
        xs.push_back(sample(Model::bernoulli(0.5), n, derive_seed(5, 0, i)));
        ys.push_back(sample(Model::bernoulli(0.9), n, derive_seed(5, 1, i)));
    }
    // MMD^2 = 2 d^2 with d the difference of mean one-frequencies; the delta
    // method gives sd(MMD^2) = 4 |d| se(d).
    const double d = 0.4;
    const double se_d = std::sqrt(0.25 / (m * n) + 0.09 / (m * n));
    EXPECT_NEAR(mmd2(xs, ys, FeatureMap::symbol_histogram()), 2 * d * d, 3 * 4 * d * se_d);
}

TEST(Mmd, ErrorsAndRanges) {
    EXPECT_THROW(FeatureMap::kgram(4), config_error);
    const std::vector<std::vector<double>> a{{1, 0}}, b{{1, 0, 0}};
    EXPECT_THROW(mmd2(a, b), input_error);
    EXPECT_THROW(mmd2(std::span<const std::vector<double>>{}, b), input_error);
    const auto f = FeatureMap::kgram(2)(parse_sequence("0110", kBin));
    EXPECT_EQ(f, (std::vector<double>{0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3}));
}

TEST(Sandwich, BernoulliExample) {
    const auto q = Model::bernoulli(0.8, 4), p = Model::bernoulli(0.5);
    const auto s = prior_from_description_bits({q, Model::bernoulli(0.5, 1)});
    const auto r = sandwich_verify(q, p, s, 20, 8, 10000, 11);
    EXPECT_NEAR(r.kl, 20 * kBernKl, 1e-12);
    EXPECT_NEAR(r.lower, r.kl - std::log(16.0) / 8, 1e-12);
    EXPECT_GE(r.estimate, r.lower - 3 * r.std_error);
    EXPECT_LE(r.estimate, r.kl + 3 * r.std_error);
    EXPECT_GT(r.std_error, 0.0);
}

TEST(Sandwich, SingleComponentCollapsesToKl) {
    const auto q = Model::bernoulli(0.8, 0), p = Model::bernoulli(0.5);
    const auto s = prior_from_description_bits({q});
    const auto r = sandwich_verify(q, p, s, 20, 4, 5000, 2);
    EXPECT_DOUBLE_EQ(r.lower, r.kl);
    EXPECT_NEAR(r.estimate, r.kl, 3 * r.std_error);
}

TEST(Sandwich, SlackShrinksWithB) {
    const auto q = Model::bernoulli(0.8, 4), p = Model::bernoulli(0.5);
    const auto s = prior_from_description_bits({q, Model::bernoulli(0.5, 1)});
    const auto r1 = sandwich_verify(q, p, s, 20, 1, 100, 3);
    const auto r64 = sandwich_verify(q, p, s, 20, 64, 100, 3);
    EXPECT_NEAR((r1.kl - r1.lower) / (r64.kl - r64.lower), 64.0, 1e-9);
}

TEST(Sandwich, DeterministicAcrossWorkers) {
    const auto q = Model::bernoulli(0.8, 4), p = Model::bernoulli(0.5);
    const auto s = prior_from_description_bits({q, Model::bernoulli(0.5, 1)});
    const auto a = sandwich_verify(q, p, s, 20, 4, 2000, 9, 1);
    const auto b = sandwich_verify(q, p, s, 20, 4, 2000, 9, 7);
    EXPECT_EQ(a.estimate, b.estimate);
    EXPECT_EQ(a.std_error, b.std_error);
}

TEST(Sandwich, QMissingFromMixture) {
    const auto s = prior_from_description_bits({Model::bernoulli(0.5, 1)});
    EXPECT_THROW(sandwich_verify(Model::bernoulli(0.8), Model::bernoulli(0.5), s, 5, 2, 10, 1), config_error);
}
