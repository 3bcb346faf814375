#pragma once

// Finite stand-in for Solomonoff's mixture: an explicit list of computable
// models with prior weights 2^-description_bits. Total prior mass may fall
// below one (semimeasure) and is never renormalized.

#include <realism/models.hpp>

#include <numeric>

namespace realism {

enum class Normalization { normalized, semimeasure };

struct MixtureComponent {
    double log_prior;  // nats
    Model model;
};

class Mixture {
public:
    static constexpr double kMassTolerance = 1e-12;

    explicit Mixture(std::vector<MixtureComponent> components) : components_(std::move(components)) {
        if (components_.empty()) throw config_error("mixture needs at least one component");
        const Alphabet& a = components_.front().model.alphabet();
        std::vector<double> priors;
        for (const auto& c : components_) {
            if (!(c.model.alphabet() == a)) throw config_error("mixture components disagree on alphabet");
            if (std::isnan(c.log_prior) || c.log_prior == kInf) throw config_error("invalid log prior");
            priors.push_back(c.log_prior);
        }
        log_total_ = log_sum_exp(priors);
        const double total = std::exp(log_total_);
        if (total > 1.0 + kMassTolerance)
            throw config_error("mixture prior mass " + std::to_string(total) + " exceeds 1");
        normalization_ = std::abs(total - 1.0) <= kMassTolerance ? Normalization::normalized : Normalization::semimeasure;
    }

    std::span<const MixtureComponent> components() const noexcept { return components_; }
    std::size_t size() const noexcept { return components_.size(); }
    const MixtureComponent& operator[](std::size_t i) const { return components_[i]; }
    const Alphabet& alphabet() const noexcept { return components_.front().model.alphabet(); }
    Normalization normalization() const noexcept { return normalization_; }
    double log_total_prior() const noexcept { return log_total_; }
    double total_prior() const noexcept { return std::exp(log_total_); }

    /// Index of the first component equal to `m`, or size() if absent.
    std::size_t find(const Model& m) const {
        for (std::size_t i = 0; i < components_.size(); ++i)
            if (components_[i].model == m) return i;
        return components_.size();
    }

private:
    std::vector<MixtureComponent> components_;
    Normalization normalization_;
    double log_total_;
};

/// Prior log-weight -bits * ln 2 for each model; rejects total mass above 1.
inline Mixture prior_from_description_bits(const std::vector<Model>& models) {
    std::vector<MixtureComponent> comps;
    comps.reserve(models.size());
    for (const auto& m : models) comps.push_back({-m.description_bits() * kLn2, m});
    return Mixture(std::move(comps));
}

struct Posterior {
    std::vector<double> log_weights;

    std::vector<double> weights() const {
        std::vector<double> w(log_weights.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i]);
        return w;
    }
};

/// Per-component log-likelihoods log Q_n(x_b): rows are components, columns
/// batch elements.
inline std::vector<std::vector<double>> component_log_probs(const Mixture& s, std::span<const Sequence> batch) {
    std::vector<std::vector<double>> out(s.size(), std::vector<double>(batch.size()));
    for (std::size_t n = 0; n < s.size(); ++n)
        for (std::size_t b = 0; b < batch.size(); ++b) out[n][b] = log_prob(s[n].model, batch[b]);
    return out;
}

/// log S(x) = log sum_n pi_n Q_n(x). Returns -inf when every component
/// assigns zero probability.
inline double log_mix_prob(const Mixture& s, const Sequence& x) {
    std::vector<double> terms(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) terms[n] = s[n].log_prior + log_prob(s[n].model, x);
    return log_sum_exp(terms);
}

namespace detail {

inline std::vector<double> batch_terms(const Mixture& s, const std::vector<std::vector<double>>& lp) {
    std::vector<double> terms(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) {
        double t = s[n].log_prior;
        for (double v : lp[n]) t += v;
        terms[n] = t;
    }
    return terms;
}

}  // namespace detail

/// log sum_n pi_n prod_b Q_n(x_b): components are shared across the batch.
inline double batch_log_mix_prob(const Mixture& s, std::span<const Sequence> batch) {
    if (batch.empty()) throw input_error("batch must be non-empty");
    const auto lp = component_log_probs(s, batch);
    return log_sum_exp(detail::batch_terms(s, lp));
}

/// pi(n | batch) proportional to pi_n prod_b Q_n(x_b). An empty batch gives
/// the normalized prior.
inline Posterior posterior(const Mixture& s, std::span<const Sequence> batch) {
    const auto lp = component_log_probs(s, batch);
    const auto terms = detail::batch_terms(s, lp);
    const double z = log_sum_exp(terms);
    if (z == -kInf) throw input_error("posterior undefined: every component assigns zero probability to the batch");
    Posterior post;
    post.log_weights.resize(terms.size());
    for (std::size_t n = 0; n < terms.size(); ++n) post.log_weights[n] = terms[n] - z;
    return post;
}


/// True if `pattern` is not a repetition of a shorter block.
inline bool is_primitive_pattern(std::span<const Symbol> pattern) {
    const std::size_t n = pattern.size();
    for (std::size_t d = 1; d < n; ++d) {
        if (n % d) continue;
        bool repeats = true;
        for (std::size_t i = d; i < n && repeats; ++i) repeats = pattern[i] == pattern[i - d];
        if (repeats) return false;
    }
    return true;
}

/// Default model zoo with documented description lengths (bits):
///   uniform (for a binary alphabet this is the fair coin)  2
///   constant-symbol, one per symbol                         3 + log2 k
///   periodic-pattern, primitive patterns of period 2..4     5 + L log2 k
///     (a period is included only when k^L <= 256)
///   markov-order1 grid                                      3 + log2(#grid)
///     binary: P(1|0), P(1|1) in {0.1, ..., 0.9}; larger alphabets: stay
///     probability in {0.1, ..., 0.9}, remaining mass spread uniformly.
/// Each family except the periodic ones carries total prior mass 1/8
/// (uniform 1/4); each periodic family at most 1/32. The zoo is a
/// semimeasure of total mass below 0.6.
inline std::vector<Model> default_zoo(Alphabet a) {
    const std::size_t k = a.size();
    const double log2k = std::log2(static_cast<double>(k));
    std::vector<Model> zoo;
    zoo.push_back(Model::uniform(a, 2.0, "uniform"));
    for (Symbol s = 0; s < k; ++s)
        zoo.push_back(Model::constant(a, s, 3.0 + log2k, "constant-" + std::to_string(s)));
    for (std::size_t period = 2; period <= 4; ++period) {
        const double count = std::pow(static_cast<double>(k), static_cast<double>(period));
        if (count > 256.0) break;
        std::vector<Symbol> pat(period, 0);
        for (std::size_t idx = 0; idx < static_cast<std::size_t>(count); ++idx) {
            std::size_t v = idx;
            for (std::size_t i = period; i-- > 0;) {
                pat[i] = static_cast<Symbol>(v % k);
                v /= k;
            }
            if (!is_primitive_pattern(pat)) continue;
            std::string name = "periodic-";
            for (Symbol s : pat) name += std::to_string(s) + (k > 10 ? "." : "");
            zoo.push_back(Model::periodic(a, pat, 5.0 + static_cast<double>(period) * log2k, name));
        }
    }
    if (k == 2) {
        const double bits = 3.0 + std::log2(81.0);
        for (int i = 1; i <= 9; ++i)
            for (int j = 1; j <= 9; ++j) {
                const double a01 = i / 10.0, a11 = j / 10.0;
                zoo.push_back(Model::markov(a, {{1.0 - a01, a01}, {1.0 - a11, a11}}, {}, bits,
                                            "markov-" + std::to_string(i) + std::to_string(j)));
            }
    } else {
        const double bits = 3.0 + std::log2(9.0);
        for (int i = 1; i <= 9; ++i) {
            const double stay = i / 10.0;
            const double move = (1.0 - stay) / static_cast<double>(k - 1);
            std::vector<std::vector<double>> t(k, std::vector<double>(k, move));
            for (std::size_t r = 0; r < k; ++r) {
                t[r][r] = stay;
                // Fold the rounding residue into the diagonal so rows sum to 1.
                double sum = 0.0;
                for (double v : t[r]) sum += v;
                t[r][r] += 1.0 - sum;
            }
            zoo.push_back(Model::markov(a, std::move(t), {}, bits, "markov-stay" + std::to_string(i)));
        }
    }
    return zoo;
}

inline Mixture default_zoo_mixture(Alphabet a) { return prior_from_description_bits(default_zoo(a)); }

}  // namespace realism
