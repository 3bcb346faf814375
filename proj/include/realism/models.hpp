#pragma once

// Exact computable models over finite alphabets. Each model carries the
// description length (in bits) that the mixture module turns into a prior
// weight 2^-bits. All log quantities are natural logs; zero probability is
// -infinity.

#include <realism/core.hpp>

#include <cmath>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace realism {

enum class ModelKind { iid_categorical, markov_order1, constant_symbol, periodic_pattern, uniform, memorized_dataset };

inline const char* kind_name(ModelKind k) noexcept {
    switch (k) {
        case ModelKind::iid_categorical: return "iid-categorical";
        case ModelKind::markov_order1: return "markov-order1";
        case ModelKind::constant_symbol: return "constant-symbol";
        case ModelKind::periodic_pattern: return "periodic-pattern";
        case ModelKind::uniform: return "uniform";
        case ModelKind::memorized_dataset: return "memorized-dataset";
    }
    return "?";
}

namespace detail {

inline constexpr double kNormTolerance = 1e-12;

inline void check_distribution(std::span<const double> probs, std::size_t expected, const std::string& what) {
    if (probs.size() != expected)
        throw config_error(what + ": expected " + std::to_string(expected) + " probabilities, got " +
                           std::to_string(probs.size()));
    double total = 0.0;
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) throw config_error(what + ": probability outside [0, 1]");
        total += p;
    }
    if (std::abs(total - 1.0) > kNormTolerance) throw config_error(what + ": probabilities do not sum to 1");
}

inline std::vector<double> logs_of(std::span<const double> probs) {
    std::vector<double> out(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) out[i] = probs[i] > 0.0 ? std::log(probs[i]) : -kInf;
    return out;
}

}  // namespace detail

struct IidCategorical {
    std::vector<double> probs;
};

/// First-order chain; `initial` is the distribution of the first symbol.
struct MarkovOrder1 {
    std::vector<std::vector<double>> transitions;
    std::vector<double> initial;
};

struct ConstantSymbol {
    Symbol symbol;
};

/// Point mass on the infinite repetition of `pattern`, starting at phase 0.
struct PeriodicPattern {
    std::vector<Symbol> pattern;
};

struct UniformSymbols {};

/// Uniform mixture of point masses on stored sequences of a common length.
struct MemorizedDataset {
    std::vector<std::vector<Symbol>> dataset;
};

using ModelParams =
    std::variant<IidCategorical, MarkovOrder1, ConstantSymbol, PeriodicPattern, UniformSymbols, MemorizedDataset>;

class Model {
public:
    Model(Alphabet alphabet, ModelParams params, double description_bits, std::string name = {})
        : alphabet_(alphabet), params_(std::move(params)), description_bits_(description_bits), name_(std::move(name)) {
        if (!std::isfinite(description_bits_) || description_bits_ < 0.0)
            throw config_error("description_bits must be finite and non-negative");
        validate_and_cache();
        if (name_.empty()) name_ = kind_name(kind());
    }

    // Factories ------------------------------------------------------------

    static Model iid(Alphabet a, std::vector<double> probs, double bits = 0.0, std::string name = {}) {
        return Model(a, IidCategorical{std::move(probs)}, bits, std::move(name));
    }
    static Model bernoulli(double p_one, double bits = 0.0, std::string name = {}) {
        return iid(binary_alphabet(), {1.0 - p_one, p_one}, bits, std::move(name));
    }
    static Model markov(Alphabet a, std::vector<std::vector<double>> transitions, std::vector<double> initial = {},
                        double bits = 0.0, std::string name = {}) {
        if (initial.empty()) initial.assign(a.size(), 1.0 / static_cast<double>(a.size()));
        return Model(a, MarkovOrder1{std::move(transitions), std::move(initial)}, bits, std::move(name));
    }
    static Model constant(Alphabet a, Symbol s, double bits = 0.0, std::string name = {}) {
        return Model(a, ConstantSymbol{s}, bits, std::move(name));
    }
    static Model periodic(Alphabet a, std::vector<Symbol> pattern, double bits = 0.0, std::string name = {}) {
        return Model(a, PeriodicPattern{std::move(pattern)}, bits, std::move(name));
    }
    static Model uniform(Alphabet a, double bits = 0.0, std::string name = {}) {
        return Model(a, UniformSymbols{}, bits, std::move(name));
    }
    static Model memorized(Alphabet a, std::vector<Sequence> data, double bits = 0.0, std::string name = {}) {
        MemorizedDataset m;
        for (const auto& s : data) {
            if (!(s.alphabet() == a)) throw config_error("memorized-dataset: sequence alphabet mismatch");
            m.dataset.emplace_back(s.symbols().begin(), s.symbols().end());
        }
        return Model(a, std::move(m), bits, std::move(name));
    }

    // Accessors ------------------------------------------------------------

    const Alphabet& alphabet() const noexcept { return alphabet_; }
    const ModelParams& params() const noexcept { return params_; }
    double description_bits() const noexcept { return description_bits_; }
    const std::string& name() const noexcept { return name_; }
    ModelKind kind() const noexcept { return static_cast<ModelKind>(params_.index()); }

    /// Natural-log symbol probabilities for iid kinds (uniform included).
    const std::vector<double>& symbol_log_probs() const noexcept { return symbol_logs_; }
    /// Natural-log transition matrix for Markov models.
    const std::vector<std::vector<double>>& transition_log_probs() const noexcept { return transition_logs_; }
    const std::vector<double>& initial_log_probs() const noexcept { return initial_logs_; }

    /// Groups of symbols sharing one log-probability (iid kinds). Summing
    /// counts per group before multiplying keeps equiprobable symbols
    /// bit-identical in log_prob regardless of which symbols occur.
    const std::vector<std::pair<double, std::vector<Symbol>>>& log_prob_groups() const noexcept { return groups_; }

    bool is_iid() const noexcept {
        return kind() == ModelKind::iid_categorical || kind() == ModelKind::uniform;
    }

    friend bool operator==(const Model& a, const Model& b) {
        return a.alphabet_ == b.alphabet_ && a.description_bits_ == b.description_bits_ && a.name_ == b.name_ &&
               same_params(a.params_, b.params_);
    }

    /// Same alphabet and parameters, ignoring name and description length.
    static bool same_distribution(const Model& a, const Model& b) {
        return a.alphabet_ == b.alphabet_ && same_params(a.params_, b.params_);
    }

private:
    // Probabilities built as 1 - p differ from literals in the last ulp.
    static bool close(const std::vector<double>& a, const std::vector<double>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::abs(a[i] - b[i]) > 1e-12) return false;
        return true;
    }

    static bool same_params(const ModelParams& a, const ModelParams& b) {
        if (a.index() != b.index()) return false;
        return std::visit(
            [&](const auto& pa) {
                using T = std::decay_t<decltype(pa)>;
                const auto& pb = std::get<T>(b);
                if constexpr (std::is_same_v<T, IidCategorical>) return close(pa.probs, pb.probs);
                else if constexpr (std::is_same_v<T, MarkovOrder1>) {
                    if (pa.transitions.size() != pb.transitions.size()) return false;
                    for (std::size_t i = 0; i < pa.transitions.size(); ++i)
                        if (!close(pa.transitions[i], pb.transitions[i])) return false;
                    return close(pa.initial, pb.initial);
                }
                else if constexpr (std::is_same_v<T, ConstantSymbol>) return pa.symbol == pb.symbol;
                else if constexpr (std::is_same_v<T, PeriodicPattern>) return pa.pattern == pb.pattern;
                else if constexpr (std::is_same_v<T, UniformSymbols>) return true;
                else return pa.dataset == pb.dataset;
            },
            a);
    }

    void validate_and_cache() {
        const std::size_t k = alphabet_.size();
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, IidCategorical>) {
                    detail::check_distribution(p.probs, k, "iid-categorical");
                    symbol_logs_ = detail::logs_of(p.probs);
                } else if constexpr (std::is_same_v<T, UniformSymbols>) {
                    symbol_logs_.assign(k, -std::log(static_cast<double>(k)));
                } else if constexpr (std::is_same_v<T, MarkovOrder1>) {
                    if (p.transitions.size() != k) throw config_error("markov-order1: transition matrix must have one row per symbol");
                    for (std::size_t i = 0; i < k; ++i) {
                        detail::check_distribution(p.transitions[i], k, "markov-order1 row " + std::to_string(i));
                        transition_logs_.push_back(detail::logs_of(p.transitions[i]));
                    }
                    detail::check_distribution(p.initial, k, "markov-order1 initial");
                    initial_logs_ = detail::logs_of(p.initial);
                } else if constexpr (std::is_same_v<T, ConstantSymbol>) {
                    if (!alphabet_.contains(p.symbol)) throw config_error("constant-symbol: symbol outside alphabet");
                } else if constexpr (std::is_same_v<T, PeriodicPattern>) {
                    if (p.pattern.empty()) throw config_error("periodic-pattern: empty pattern");
                    for (Symbol s : p.pattern)
                        if (!alphabet_.contains(s)) throw config_error("periodic-pattern: symbol outside alphabet");
                } else {
                    if (p.dataset.empty()) throw config_error("memorized-dataset: empty dataset");
                    const std::size_t len = p.dataset.front().size();
                    if (len == 0) throw config_error("memorized-dataset: empty stored sequence");
                    for (const auto& s : p.dataset) {
                        if (s.size() != len) throw config_error("memorized-dataset: stored sequences differ in length");
                        for (Symbol c : s)
                            if (!alphabet_.contains(c)) throw config_error("memorized-dataset: symbol outside alphabet");
                    }
                }
            },
            params_);
        if (!symbol_logs_.empty()) {
            std::map<double, std::vector<Symbol>> by_value;
            for (Symbol s = 0; s < symbol_logs_.size(); ++s) by_value[symbol_logs_[s]].push_back(s);
            for (auto& [v, syms] : by_value) groups_.emplace_back(v, std::move(syms));
        }
    }

    Alphabet alphabet_;
    ModelParams params_;
    double description_bits_;
    std::string name_;
    std::vector<double> symbol_logs_;
    std::vector<std::vector<double>> transition_logs_;
    std::vector<double> initial_logs_;
    std::vector<std::pair<double, std::vector<Symbol>>> groups_;
};

namespace detail {

inline void check_alphabet(const Model& m, const Alphabet& a) {
    if (!(m.alphabet() == a))
        throw input_error("alphabet mismatch: model '" + m.name() + "' has " + std::to_string(m.alphabet().size()) +
                          " symbols, sequence has " + std::to_string(a.size()));
}

inline void check_scorable(const Model& m, const Sequence& x) {
    check_alphabet(m, x.alphabet());
    if (x.empty()) throw input_error("empty sequence cannot be scored");
}

/// Sum over symbol groups of count * log-prob, skipping unused groups so that
/// zero-probability symbols only matter when they occur.
inline double iid_log_prob(const Model& m, std::span<const std::size_t> counts) {
    double total = 0.0;
    for (const auto& [v, syms] : m.log_prob_groups()) {
        std::size_t c = 0;
        for (Symbol s : syms) c += counts[s];
        if (c == 0) continue;
        if (v == -kInf) return -kInf;
        total += static_cast<double>(c) * v;
    }
    return total;
}

}  // namespace detail

/// Exact log-probability of x under the model (nats, -inf allowed).
inline double log_prob(const Model& model, const Sequence& x) {
    detail::check_scorable(model, x);
    const auto sym = x.symbols();
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, IidCategorical> || std::is_same_v<T, UniformSymbols>) {
                const auto counts = x.histogram();
                return detail::iid_log_prob(model, counts);
            } else if constexpr (std::is_same_v<T, MarkovOrder1>) {
                double total = model.initial_log_probs()[sym[0]];
                const auto& t = model.transition_log_probs();
                for (std::size_t i = 1; i < sym.size() && total != -kInf; ++i) total += t[sym[i - 1]][sym[i]];
                return total;
            } else if constexpr (std::is_same_v<T, ConstantSymbol>) {
                for (Symbol s : sym)
                    if (s != p.symbol) return -kInf;
                return 0.0;
            } else if constexpr (std::is_same_v<T, PeriodicPattern>) {
                for (std::size_t i = 0; i < sym.size(); ++i)
                    if (sym[i] != p.pattern[i % p.pattern.size()]) return -kInf;
                return 0.0;
            } else {
                std::size_t hits = 0;
                for (const auto& d : p.dataset)
                    if (d.size() == sym.size() && std::equal(d.begin(), d.end(), sym.begin())) ++hits;
                if (hits == 0) return -kInf;
                return std::log(static_cast<double>(hits)) - std::log(static_cast<double>(p.dataset.size()));
            }
        },
        model.params());
}

/// log P(symbol | prefix). The prefix may be empty. For memorized datasets
/// this is the prefix-marginal of the stored point masses.
inline double conditional_log_prob(const Model& model, const Sequence& prefix, Symbol symbol) {
    detail::check_alphabet(model, prefix.alphabet());
    if (!model.alphabet().contains(symbol)) throw input_error("symbol outside alphabet");
    const auto sym = prefix.symbols();
    const std::size_t n = sym.size();
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, IidCategorical> || std::is_same_v<T, UniformSymbols>) {
                return model.symbol_log_probs()[symbol];
            } else if constexpr (std::is_same_v<T, MarkovOrder1>) {
                if (n == 0) return model.initial_log_probs()[symbol];
                return model.transition_log_probs()[sym[n - 1]][symbol];
            } else if constexpr (std::is_same_v<T, ConstantSymbol>) {
                return symbol == p.symbol ? 0.0 : -kInf;
            } else if constexpr (std::is_same_v<T, PeriodicPattern>) {
                return symbol == p.pattern[n % p.pattern.size()] ? 0.0 : -kInf;
            } else {
                std::size_t with_prefix = 0, with_next = 0;
                for (const auto& d : p.dataset) {
                    if (d.size() <= n || !std::equal(sym.begin(), sym.end(), d.begin())) continue;
                    ++with_prefix;
                    if (d[n] == symbol) ++with_next;
                }
                if (with_next == 0) return -kInf;
                return std::log(static_cast<double>(with_next)) - std::log(static_cast<double>(with_prefix));
            }
        },
        model.params());
}

/// Stationary distribution of a transition matrix. Requires a single closed
/// communicating class; iterates the lazy chain (T + I)/2, which has the same
/// fixed points and is aperiodic, to tolerance 1e-12 within 1e5 sweeps.
inline std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& t) {
    const std::size_t k = t.size();
    std::vector<std::vector<char>> reach(k, std::vector<char>(k, 0));
    for (std::size_t i = 0; i < k; ++i) {
        reach[i][i] = 1;
        for (std::size_t j = 0; j < k; ++j)
            if (t[i][j] > 0.0) reach[i][j] = 1;
    }
    for (std::size_t m = 0; m < k; ++m)
        for (std::size_t i = 0; i < k; ++i)
            if (reach[i][m])
                for (std::size_t j = 0; j < k; ++j)
                    if (reach[m][j]) reach[i][j] = 1;
    // A state is in a closed class if everything it reaches reaches it back.
    std::vector<int> closed_class_rep;
    for (std::size_t i = 0; i < k; ++i) {
        bool closed = true;
        for (std::size_t j = 0; j < k && closed; ++j)
            if (reach[i][j] && !reach[j][i]) closed = false;
        if (!closed) continue;
        bool seen = false;
        for (int r : closed_class_rep)
            if (reach[i][static_cast<std::size_t>(r)]) seen = true;
        if (!seen) closed_class_rep.push_back(static_cast<int>(i));
    }
    if (closed_class_rep.size() != 1)
        throw unsupported_error("markov chain is not ergodic: no unique stationary distribution");

    std::vector<double> pi(k, 1.0 / static_cast<double>(k)), next(k);
    for (int iter = 0; iter < 100000; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) next[j] += 0.5 * pi[i] * t[i][j];
        for (std::size_t j = 0; j < k; ++j) next[j] += 0.5 * pi[j];
        double diff = 0.0;
        for (std::size_t j = 0; j < k; ++j) diff = std::max(diff, std::abs(next[j] - pi[j]));
        pi.swap(next);
        if (diff < 1e-12) return pi;
    }
    throw unsupported_error("markov stationary distribution did not converge");
}

/// -sum p log p with the 0 log 0 = 0 convention.
inline double entropy(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs)
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

/// Entropy per symbol (nats). Stationary entropy rate for Markov chains.
inline double entropy_rate(const Model& model) {
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, IidCategorical>) {
                return entropy(p.probs);
            } else if constexpr (std::is_same_v<T, UniformSymbols>) {
                return std::log(static_cast<double>(model.alphabet().size()));
            } else if constexpr (std::is_same_v<T, MarkovOrder1>) {
                const auto pi = stationary_distribution(p.transitions);
                double h = 0.0;
                for (std::size_t i = 0; i < pi.size(); ++i) h += pi[i] * entropy(p.transitions[i]);
                return h;
            } else {
                throw unsupported_error(std::string("entropy_rate is not defined for ") + kind_name(model.kind()));
            }
        },
        model.params());
}

/// Draws a length-n sequence; deterministic in (model, n, seed).
inline Sequence sample(const Model& model, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw input_error("sample length must be at least 1");
    Rng rng(seed);
    std::vector<Symbol> out;
    out.reserve(n);
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, IidCategorical>) {
                for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<Symbol>(sample_categorical(rng, p.probs)));
            } else if constexpr (std::is_same_v<T, UniformSymbols>) {
                for (std::size_t i = 0; i < n; ++i)
                    out.push_back(static_cast<Symbol>(uniform_index(rng, model.alphabet().size())));
            } else if constexpr (std::is_same_v<T, MarkovOrder1>) {
                out.push_back(static_cast<Symbol>(sample_categorical(rng, p.initial)));
                for (std::size_t i = 1; i < n; ++i)
                    out.push_back(static_cast<Symbol>(sample_categorical(rng, p.transitions[out.back()])));
            } else if constexpr (std::is_same_v<T, ConstantSymbol>) {
                out.assign(n, p.symbol);
            } else if constexpr (std::is_same_v<T, PeriodicPattern>) {
                for (std::size_t i = 0; i < n; ++i) out.push_back(p.pattern[i % p.pattern.size()]);
            } else {
                if (p.dataset.front().size() != n)
                    throw input_error("memorized-dataset can only emit sequences of its stored length");
                const auto& pick = p.dataset[uniform_index(rng, p.dataset.size())];
                out.assign(pick.begin(), pick.end());
            }
        },
        model.params());
    return Sequence(model.alphabet(), std::move(out));
}

/// -(1/N) log P(x). For iid kinds the per-group frequencies are formed before
/// multiplying by the log-probabilities, so a fair coin yields exactly ln 2.
inline double per_symbol_neg_log_prob(const Model& model, const Sequence& x) {
    detail::check_scorable(model, x);
    const double n = static_cast<double>(x.size());
    if (!model.is_iid()) return -log_prob(model, x) / n;
    const auto counts = x.histogram();
    double total = 0.0;
    for (const auto& [v, syms] : model.log_prob_groups()) {
        std::size_t c = 0;
        for (Symbol s : syms) c += counts[s];
        if (c == 0) continue;
        if (v == -kInf) return kInf;
        total += (static_cast<double>(c) / n) * -v;
    }
    return total;
}

}  // namespace realism
