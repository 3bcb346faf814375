#pragma once

// Exact divergences and estimators used to check the critic's bounds:
// KL and total variation by closed form or enumeration, the KL variational
// lower bound E_Q[T] - E_P[exp(T - 1)], mean-feature MMD, and the Monte Carlo
// sandwich  KL - log(1/pi_Q)/B <= (1/B) E[U^B] <= KL.

#include <realism/critic.hpp>
#include <realism/typicality.hpp>

#include <functional>
#include <optional>

namespace realism {

namespace detail {

/// Probability-space first-order chain equivalent to an iid, uniform,
/// constant or Markov model. Empty for other kinds.
struct ChainForm {
    std::vector<double> initial;
    std::vector<std::vector<double>> transitions;
};

inline std::optional<ChainForm> chain_form(const Model& m) {
    const std::size_t k = m.alphabet().size();
    auto iid_rows = [&](std::vector<double> probs) {
        return ChainForm{probs, std::vector<std::vector<double>>(k, probs)};
    };
    switch (m.kind()) {
        case ModelKind::iid_categorical: return iid_rows(std::get<IidCategorical>(m.params()).probs);
        case ModelKind::uniform: return iid_rows(std::vector<double>(k, 1.0 / static_cast<double>(k)));
        case ModelKind::constant_symbol: {
            std::vector<double> probs(k, 0.0);
            probs[std::get<ConstantSymbol>(m.params()).symbol] = 1.0;
            return iid_rows(std::move(probs));
        }
        case ModelKind::markov_order1: {
            const auto& mk = std::get<MarkovOrder1>(m.params());
            return ChainForm{mk.initial, mk.transitions};
        }
        default: return std::nullopt;
    }
}

/// sum_j q_j log(q_j / p_j); +inf when q_j > 0 = p_j.
inline double kl_rows(std::span<const double> q, std::span<const double> p) {
    double kl = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (q[j] == 0.0) continue;
        if (p[j] == 0.0) return kInf;
        kl += q[j] * (std::log(q[j]) - std::log(p[j]));
    }
    return kl;
}

inline void check_pair(const Model& q, const Model& p) {
    if (!(q.alphabet() == p.alphabet())) throw input_error("models disagree on alphabet");
}

}  // namespace detail

/// KL(Q^N || P^N) in nats, summed over the exact state marginals of Q for
/// chain-representable models and by enumeration otherwise.
inline double kl_exact(const Model& q, const Model& p, std::size_t n) {
    detail::check_pair(q, p);
    if (n == 0) throw input_error("length must be at least 1");
    const auto cq = detail::chain_form(q), cp = detail::chain_form(p);
    if (cq && cp) {
        double kl = detail::kl_rows(cq->initial, cp->initial);
        std::vector<double> mu = cq->initial, next(mu.size());
        std::vector<double> row_kl(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) row_kl[i] = detail::kl_rows(cq->transitions[i], cp->transitions[i]);
        for (std::size_t t = 1; t < n && kl != kInf; ++t) {
            for (std::size_t i = 0; i < mu.size(); ++i) {
                if (mu[i] == 0.0) continue;
                if (row_kl[i] == kInf) return kInf;
                kl += mu[i] * row_kl[i];
            }
            std::fill(next.begin(), next.end(), 0.0);
            for (std::size_t i = 0; i < mu.size(); ++i)
                for (std::size_t j = 0; j < mu.size(); ++j) next[j] += mu[i] * cq->transitions[i][j];
            mu.swap(next);
        }
        return kl;
    }
    CompensatedSum kl;
    bool infinite = false;
    for_each_sequence(q.alphabet(), n, [&](const Sequence& x) {
        const double lq = log_prob(q, x);
        if (lq == -kInf) return;
        const double lp = log_prob(p, x);
        if (lp == -kInf) infinite = true;
        else kl.add(std::exp(lq) * (lq - lp));
    });
    return infinite ? kInf : kl.value();
}

/// Stationary per-symbol KL rate sum_i pi_Q(i) KL(Q_i. || P_i.) for
/// chain-representable models.
inline double kl_rate(const Model& q, const Model& p) {
    detail::check_pair(q, p);
    const auto cq = detail::chain_form(q), cp = detail::chain_form(p);
    if (!cq || !cp) throw unsupported_error("kl_rate needs iid, uniform, constant or Markov models");
    if (q.kind() != ModelKind::markov_order1) return detail::kl_rows(cq->initial, cp->initial);
    const auto pi = stationary_distribution(cq->transitions);
    double kl = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (pi[i] == 0.0) continue;
        const double r = detail::kl_rows(cq->transitions[i], cp->transitions[i]);
        if (r == kInf) return kInf;
        kl += pi[i] * r;
    }
    return kl;
}

struct TvResult {
    double tv;         // (1/2) sum_x |Q(x) - P(x)|
    double p_success;  // optimal observer accuracy with equal priors: tv/2 + 1/2
};

inline TvResult tv_exact(const Model& q, const Model& p, std::size_t n) {
    detail::check_pair(q, p);
    CompensatedSum acc;
    for_each_sequence(q.alphabet(), n, [&](const Sequence& x) {
        acc.add(std::abs(std::exp(log_prob(q, x)) - std::exp(log_prob(p, x))));
    });
    const double tv = std::min(1.0, 0.5 * acc.value());
    return {tv, 0.5 * tv + 0.5};
}

using ScoreFunction = std::function<double(const Sequence&)>;

/// T_Q(x) = log Q(x) - log P(x) + 1, the maximizer of the KL variational
/// bound. +inf where P(x) = 0 < Q(x); -inf where Q(x) = 0.
inline ScoreFunction optimal_critic(const Model& q, const Model& p) {
    detail::check_pair(q, p);
    return [q, p](const Sequence& x) {
        const double lq = log_prob(q, x);
        if (lq == -kInf) return -kInf;
        const double lp = log_prob(p, x);
        if (lp == -kInf) return kInf;
        return lq - lp + 1.0;
    };
}

/// E_Q[T] - E_P[exp(T - 1)] by exact summation over all length-n sequences
/// (the KL instance of the f-divergence bound, f*(t) = exp(t - 1)). Any
/// overflow or undefined term yields the vacuous bound -inf.
inline double f_div_bound(const ScoreFunction& t, const Model& q, const Model& p, std::size_t n) {
    detail::check_pair(q, p);
    CompensatedSum eq, ep;
    bool vacuous = false;
    for_each_sequence(q.alphabet(), n, [&](const Sequence& x) {
        const double tx = t(x);
        const double lq = log_prob(q, x);
        const double lp = log_prob(p, x);
        if (lq != -kInf) eq.add(std::exp(lq) * tx);
        if (lp != -kInf) {
            const double e = std::exp(lp + tx - 1.0);
            if (std::isinf(e) || std::isnan(e)) vacuous = true;
            else ep.add(e);
        }
    });
    const double bound = eq.value() - ep.value();
    if (vacuous || std::isnan(bound)) return -kInf;
    return bound;
}

// ---------------------------------------------------------------------------
// MMD with explicit feature maps
// ---------------------------------------------------------------------------

struct FeatureMap {
    /// 1 = symbol histogram; 2 or 3 = k-gram histogram.
    unsigned k = 1;

    static FeatureMap symbol_histogram() { return {1}; }
    static FeatureMap kgram(unsigned k) {
        if (k < 1 || k > 3) throw config_error("k-gram features need 1 <= k <= 3");
        return {k};
    }

    std::size_t dimension(const Alphabet& a) const {
        std::size_t d = 1;
        for (unsigned i = 0; i < k; ++i) d *= a.size();
        return d;
    }

    /// Normalized k-gram frequencies of x (all zero when x is shorter than k).
    std::vector<double> operator()(const Sequence& x) const {
        std::vector<double> f(dimension(x.alphabet()), 0.0);
        if (x.size() < k) return f;
        const std::size_t windows = x.size() - k + 1;
        for (std::size_t i = 0; i < windows; ++i) {
            std::size_t idx = 0;
            for (unsigned j = 0; j < k; ++j) idx = idx * x.alphabet().size() + x[i + j];
            f[idx] += 1.0;
        }
        for (double& v : f) v /= static_cast<double>(windows);
        return f;
    }
};

/// Squared distance between the mean feature vectors of two sets.
inline double mmd2(std::span<const std::vector<double>> xs, std::span<const std::vector<double>> ys) {
    if (xs.empty() || ys.empty()) throw input_error("mmd2 needs two non-empty sets");
    const std::size_t d = xs.front().size();
    for (const auto& v : xs)
        if (v.size() != d) throw input_error("feature dimension mismatch");
    for (const auto& v : ys)
        if (v.size() != d) throw input_error("feature dimension mismatch");
    std::vector<double> mx(d, 0.0), my(d, 0.0);
    for (const auto& v : xs)
        for (std::size_t i = 0; i < d; ++i) mx[i] += v[i];
    for (const auto& v : ys)
        for (std::size_t i = 0; i < d; ++i) my[i] += v[i];
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = mx[i] / static_cast<double>(xs.size()) - my[i] / static_cast<double>(ys.size());
        s += diff * diff;
    }
    return s;
}

inline double mmd2(std::span<const Sequence> xs, std::span<const Sequence> ys, const FeatureMap& phi) {
    std::vector<std::vector<double>> fx, fy;
    for (const auto& x : xs) fx.push_back(phi(x));
    for (const auto& y : ys) fy.push_back(phi(y));
    return mmd2(fx, fy);
}

// ---------------------------------------------------------------------------
// Sandwich verification
// ---------------------------------------------------------------------------

struct SandwichResult {
    double kl;         // KL(Q^N || P^N), nats
    double lower;      // kl - log(1/pi_Q) / B
    double estimate;   // mean over batches of U^B / B
    double std_error;  // standard error of `estimate`
    std::size_t batch_size;
    std::size_t num_batches;
};

/// Monte Carlo estimate of (1/B) E_{Q^B}[U^B] with its bounds. Batch j is
/// drawn from per-item seeds derived from (seed, j), so the result does not
/// depend on `workers`.
inline SandwichResult sandwich_verify(const Model& q, const Model& p, const Mixture& s, std::size_t n,
                                      std::size_t batch_size, std::size_t num_batches, std::uint64_t seed,
                                      std::size_t workers = 1) {
    if (batch_size == 0 || num_batches < 2) throw config_error("sandwich needs B >= 1 and at least 2 batches");
    std::size_t qi = s.size();
    for (std::size_t i = 0; i < s.size(); ++i)
        if (Model::same_distribution(s[i].model, q)) {
            qi = i;
            break;
        }
    if (qi == s.size()) throw config_error("sandwich: Q is not a component of the mixture");
    const double kl = kl_exact(q, p, n);
    const double log_inv_pi = -s[qi].log_prior;
    std::vector<double> per_batch(num_batches);
    parallel_for(num_batches, workers, [&](std::size_t j) {
        const std::uint64_t bs = derive_seed(seed, 0x5357, j);
        std::vector<Sequence> batch;
        batch.reserve(batch_size);
        double log_p = 0.0;
        for (std::size_t b = 0; b < batch_size; ++b) {
            batch.push_back(sample(q, n, derive_seed(bs, b)));
            log_p += log_prob(p, batch.back());
        }
        per_batch[j] = deficiency(batch_log_mix_prob(s, batch), log_p) / static_cast<double>(batch_size);
    });
    CompensatedSum sum;
    for (double v : per_batch) sum.add(v);
    const double mean = sum.value() / static_cast<double>(num_batches);
    CompensatedSum sq;
    for (double v : per_batch) sq.add((v - mean) * (v - mean));
    const double var = sq.value() / static_cast<double>(num_batches - 1);
    return {kl, kl - log_inv_pi / static_cast<double>(batch_size), mean,
            std::sqrt(var / static_cast<double>(num_batches)), batch_size, num_batches};
}

}  // namespace realism
