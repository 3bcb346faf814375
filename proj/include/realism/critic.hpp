#pragma once

// Universal critics. The score is the randomness deficiency
//
//   U(x) = log S(x) - log P(x)
//
// with S the finite mixture. Large U means unrealistic under P. The batched
// critic scores a whole i.i.d. batch against product alternatives, and the
// sequential critic splits the batched score into per-item predictive scores.

#include <realism/mixture.hpp>

#include <optional>

namespace realism {

struct CriticReport {
    double log_p = 0.0;  // log P(x) or sum_b log P(x_b)
    double log_s = 0.0;  // log S(x) or log S^B(x^B)
    double u = 0.0;      // log_s - log_p; +inf when P assigns zero probability
    std::optional<std::vector<double>> per_step;
    std::optional<Posterior> posterior;
};

/// log_s - log_p with P(x) = 0 mapped to +inf (also when S(x) = 0).
inline double deficiency(double log_s, double log_p) noexcept {
    if (log_p == -kInf) return kInf;
    return log_s - log_p;
}

namespace detail {

inline void check_critic_inputs(const Model& p, const Mixture& s, const Alphabet& a) {
    check_alphabet(p, a);
    if (!(s.alphabet() == a)) throw input_error("alphabet mismatch between mixture and input");
}

}  // namespace detail

inline CriticReport universal_critic(const Model& p, const Mixture& s, const Sequence& x) {
    detail::check_critic_inputs(p, s, x.alphabet());
    CriticReport r;
    r.log_p = log_prob(p, x);
    r.log_s = log_mix_prob(s, x);
    r.u = deficiency(r.log_s, r.log_p);
    return r;
}

enum class Orientation {
    deficiency,  // log S(x | history) - log P(x); large means unrealistic
    reward,      // log P(x) - log S(x | history); large means realistic
};

/// Per-item sequential deficiency scores for a batch, computed from the
/// component likelihood matrix. Step b predicts x_b with the posterior after
/// x_1..x_{b-1}; the first step uses the raw (possibly sub-normalized) prior,
/// so the steps telescope to the batched score for semimeasures as well.
inline std::vector<double> sequential_scores(const Model& p, const Mixture& s, std::span<const Sequence> batch) {
    std::vector<double> scores;
    scores.reserve(batch.size());
    const auto lp = component_log_probs(s, batch);
    std::vector<double> cum(s.size()), next(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) cum[n] = s[n].log_prior;
    double log_evidence = 0.0;
    for (std::size_t b = 0; b < batch.size(); ++b) {
        for (std::size_t n = 0; n < s.size(); ++n) next[n] = cum[n] + lp[n][b];
        const double joint = log_sum_exp(next);
        const double cond = (b == 0) ? joint : (log_evidence == -kInf ? -kInf : joint - log_evidence);
        scores.push_back(deficiency(cond, log_prob(p, batch[b])));
        cum.swap(next);
        log_evidence = joint;
    }
    return scores;
}

inline CriticReport batched_critic(const Model& p, const Mixture& s, std::span<const Sequence> batch) {
    if (batch.empty()) throw input_error("batch must be non-empty");
    for (const auto& x : batch) {
        detail::check_critic_inputs(p, s, x.alphabet());
        if (x.empty()) throw input_error("empty sequence cannot be scored");
    }
    CriticReport r;
    r.log_p = 0.0;
    for (const auto& x : batch) r.log_p += log_prob(p, x);
    r.log_s = batch_log_mix_prob(s, batch);
    r.u = deficiency(r.log_s, r.log_p);
    r.per_step = sequential_scores(p, s, batch);
    if (r.log_s != -kInf) r.posterior = posterior(s, batch);
    return r;
}

/// Predictive score of x after observing `history`:
///   deficiency: log S(x | history) - log P(x)
///   reward:     log P(x) - log S(x | history)
/// with S(x | history) = S^B(history, x) / S^B(history). For an empty history
/// S(x | history) = S(x), so the deficiency orientation equals universal_critic.
inline double sequential_critic(const Model& p, const Mixture& s, std::span<const Sequence> history, const Sequence& x,
                                Orientation orientation = Orientation::deficiency) {
    detail::check_critic_inputs(p, s, x.alphabet());
    if (x.empty()) throw input_error("empty sequence cannot be scored");
    double cond;
    if (history.empty()) {
        cond = log_mix_prob(s, x);
    } else {
        const double evidence = batch_log_mix_prob(s, history);
        if (evidence == -kInf) throw input_error("posterior undefined: history has zero probability under every component");
        std::vector<Sequence> joint(history.begin(), history.end());
        joint.push_back(x);
        cond = batch_log_mix_prob(s, joint) - evidence;
    }
    const double d = deficiency(cond, log_prob(p, x));
    return orientation == Orientation::deficiency ? d : -d;
}

struct MdlScore {
    double u;
    std::size_t component;
};

/// max_n (log pi_n + log Q_n(x)) - log P(x) and its argmax (first on ties).
inline MdlScore mdl_critic(const Model& p, const Mixture& s, const Sequence& x) {
    detail::check_critic_inputs(p, s, x.alphabet());
    double best = -kInf;
    std::size_t arg = 0;
    for (std::size_t n = 0; n < s.size(); ++n) {
        const double t = s[n].log_prior + log_prob(s[n].model, x);
        if (t > best) {
            best = t;
            arg = n;
        }
    }
    return {deficiency(best, log_prob(p, x)), arg};
}

enum class Verdict { realistic, unrealistic };

inline const char* verdict_name(Verdict v) noexcept { return v == Verdict::realistic ? "realistic" : "unrealistic"; }

/// Likelihood-ratio threshold test: unrealistic iff U(x) > eta (ties accept).
inline Verdict np_test(const Model& p, const Mixture& s, const Sequence& x, double eta) {
    return universal_critic(p, s, x).u > eta ? Verdict::unrealistic : Verdict::realistic;
}

}  // namespace realism
