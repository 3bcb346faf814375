#pragma once

// Weak and strong typicality, exhaustive typical-set enumeration and the
// set-size bound |A| <= exp(N (H + delta)). Everything is in nats.

#include <realism/models.hpp>

namespace realism {

struct TypicalityReport {
    double per_symbol_neg_log_prob;
    double entropy_rate;
    double deviation;
    double delta;
    bool member;
};

/// Membership uses the strict inequality deviation < delta.
inline TypicalityReport weak_typicality(const Model& p, const Sequence& x, double delta) {
    if (!(delta > 0.0)) throw config_error("delta must be positive");
    const double h = entropy_rate(p);
    const double rate = per_symbol_neg_log_prob(p, x);
    const double dev = std::abs(rate - h);
    return {rate, h, dev, delta, dev < delta};
}

/// L1 distance between the empirical symbol frequencies and the model
/// marginal. Defined for iid marginals only.
inline double strong_typicality_distance(const Model& p, const Sequence& x) {
    if (!p.is_iid()) throw unsupported_error(std::string("strong typicality needs an iid model, got ") + kind_name(p.kind()));
    detail::check_scorable(p, x);
    const auto counts = x.histogram();
    const double n = static_cast<double>(x.size());
    double dist = 0.0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
        const double q = std::exp(p.symbol_log_probs()[s]);
        dist += std::abs(static_cast<double>(counts[s]) / n - q);
    }
    return dist;
}

struct TypicalSetCount {
    std::uint64_t count;  // weakly typical sequences of length N
    std::uint64_t total;  // k^N
    double log2_bound;    // N (H + delta) / ln 2
    double bound;         // 2^log2_bound
};

inline constexpr std::uint64_t kEnumerationBudget = std::uint64_t{1} << 24;

/// k^N, or throws budget_error above kEnumerationBudget.
inline std::uint64_t enumeration_size(const Alphabet& a, std::size_t n) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        total *= a.size();
        if (total > kEnumerationBudget)
            throw budget_error("enumeration of " + std::to_string(a.size()) + "^" + std::to_string(n) +
                               " sequences exceeds the 2^24 budget");
    }
    return total;
}

/// The index-th sequence of length n in lexicographic order.
inline Sequence nth_sequence(const Alphabet& a, std::size_t n, std::uint64_t index) {
    std::vector<Symbol> sym(n);
    for (std::size_t i = n; i-- > 0;) {
        sym[i] = static_cast<Symbol>(index % a.size());
        index /= a.size();
    }
    return Sequence(a, std::move(sym));
}

/// Calls f(sequence) for every sequence of length n, lexicographically.
template <class F>
void for_each_sequence(const Alphabet& a, std::size_t n, F&& f) {
    const std::uint64_t total = enumeration_size(a, n);
    std::vector<Symbol> sym(n, 0);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        f(Sequence(a, sym));
        for (std::size_t i = n; i-- > 0;) {
            if (++sym[i] < a.size()) break;
            sym[i] = 0;
        }
    }
}

/// Exact size of the weak typical set by full enumeration, with the bound
/// evaluated at H[x^N] = N * entropy_rate. The sequence space is split into
/// contiguous blocks across `workers`; the count is an order-free sum.
inline TypicalSetCount enumerate_typical_set(const Model& p, std::size_t n, double delta, std::size_t workers = 1) {
    if (n == 0) throw input_error("length must be at least 1");
    if (!(delta > 0.0)) throw config_error("delta must be positive");
    const std::uint64_t total = enumeration_size(p.alphabet(), n);
    const double h = entropy_rate(p);
    const std::size_t blocks = std::max<std::size_t>(1, std::min<std::uint64_t>(workers * 4, total));
    std::vector<std::uint64_t> counts(blocks, 0);
    parallel_for(blocks, workers, [&](std::size_t b) {
        const std::uint64_t lo = total * b / blocks, hi = total * (b + 1) / blocks;
        std::uint64_t c = 0;
        for (std::uint64_t idx = lo; idx < hi; ++idx) {
            const auto x = nth_sequence(p.alphabet(), n, idx);
            if (std::abs(per_symbol_neg_log_prob(p, x) - h) < delta) ++c;
        }
        counts[b] = c;
    });
    std::uint64_t count = 0;
    for (auto c : counts) count += c;
    const double log2_bound = static_cast<double>(n) * (h + delta) / kLn2;
    return {count, total, log2_bound, std::exp2(log2_bound)};
}

/// Fraction of `samples` draws of length n from p that are weakly typical.
inline double typical_membership_rate(const Model& p, std::size_t n, double delta, std::size_t samples,
                                      std::uint64_t seed, std::size_t workers = 1) {
    if (samples == 0) throw config_error("samples must be positive");
    const double h = entropy_rate(p);
    std::vector<char> hit(samples, 0);
    parallel_for(samples, workers, [&](std::size_t i) {
        const auto x = sample(p, n, derive_seed(seed, 0x7479, i));
        hit[i] = std::abs(per_symbol_neg_log_prob(p, x) - h) < delta;
    });
    std::size_t c = 0;
    for (char h_ : hit) c += static_cast<std::size_t>(h_);
    return static_cast<double>(c) / static_cast<double>(samples);
}

}  // namespace realism
