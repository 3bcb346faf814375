#pragma once

// Shared vocabulary: alphabets, symbol sequences, error types, extended-real
// log-space arithmetic, portable seeded random numbers and a deterministic
// parallel loop.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace realism {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kLn2 = std::numbers::ln2;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model, mixture or experiment configuration.
class config_error : public error {
public:
    using error::error;
};

/// Input data inconsistent with a model (alphabet mismatch, empty sequence...).
class input_error : public error {
public:
    using error::error;
};

/// Operation not defined for the given model kind.
class unsupported_error : public error {
public:
    using error::error;
};

/// Enumeration would exceed the configured budget.
class budget_error : public error {
public:
    using error::error;
};

// ---------------------------------------------------------------------------
// Alphabet and Sequence
// ---------------------------------------------------------------------------

using Symbol = std::uint32_t;

class Alphabet {
public:
    explicit Alphabet(std::size_t size) : size_(size) {
        if (size < 2) throw config_error("alphabet size must be at least 2");
    }

    std::size_t size() const noexcept { return size_; }
    bool contains(Symbol s) const noexcept { return s < size_; }

    friend bool operator==(const Alphabet&, const Alphabet&) = default;

private:
    std::size_t size_;
};

inline Alphabet binary_alphabet() { return Alphabet(2); }
inline Alphabet byte_alphabet() { return Alphabet(256); }

/// Finite-alphabet symbol string. Immutable after construction; every symbol
/// is checked against the alphabet.
class Sequence {
public:
    Sequence(Alphabet alphabet, std::vector<Symbol> symbols)
        : alphabet_(alphabet), symbols_(std::move(symbols)) {
        for (Symbol s : symbols_)
            if (!alphabet_.contains(s))
                throw input_error("symbol " + std::to_string(s) + " outside alphabet of size " +
                                  std::to_string(alphabet_.size()));
    }

    explicit Sequence(Alphabet alphabet) : alphabet_(alphabet) {}

    const Alphabet& alphabet() const noexcept { return alphabet_; }
    std::span<const Symbol> symbols() const noexcept { return symbols_; }
    std::size_t size() const noexcept { return symbols_.size(); }
    bool empty() const noexcept { return symbols_.empty(); }
    Symbol operator[](std::size_t i) const { return symbols_[i]; }

    /// Prefix of the first n symbols.
    Sequence prefix(std::size_t n) const {
        return Sequence(alphabet_, std::vector<Symbol>(symbols_.begin(),
                                                       symbols_.begin() + std::min(n, size())));
    }

    Sequence appended(Symbol s) const {
        auto copy = symbols_;
        copy.push_back(s);
        return Sequence(alphabet_, std::move(copy));
    }

    /// Per-symbol occurrence counts.
    std::vector<std::size_t> histogram() const {
        std::vector<std::size_t> counts(alphabet_.size(), 0);
        for (Symbol s : symbols_) ++counts[s];
        return counts;
    }

    /// Digits for alphabets up to 10, space-separated integers otherwise.
    std::string to_string() const {
        std::string out;
        const bool compact = alphabet_.size() <= 10;
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
            if (compact) {
                out.push_back(static_cast<char>('0' + symbols_[i]));
            } else {
                if (i) out.push_back(' ');
                out += std::to_string(symbols_[i]);
            }
        }
        return out;
    }

    friend bool operator==(const Sequence&, const Sequence&) = default;

private:
    Alphabet alphabet_;
    std::vector<Symbol> symbols_;
};

/// Parses "0101" (alphabets up to 10) or whitespace separated integers.
inline Sequence parse_sequence(const std::string& text, Alphabet alphabet) {
    std::vector<Symbol> symbols;
    const bool has_space = text.find_first_of(" \t,") != std::string::npos;
    if (!has_space && alphabet.size() <= 10) {
        for (char c : text) {
            if (c == '\r' || c == '\n') continue;
            if (c < '0' || c > '9') throw input_error(std::string("invalid symbol character '") + c + "'");
            symbols.push_back(static_cast<Symbol>(c - '0'));
        }
    } else {
        std::string token;
        auto flush = [&] {
            if (token.empty()) return;
            std::size_t pos = 0;
            unsigned long v = 0;
            try {
                v = std::stoul(token, &pos);
            } catch (const std::exception&) {
                throw input_error("invalid symbol token '" + token + "'");
            }
            if (pos != token.size()) throw input_error("invalid symbol token '" + token + "'");
            symbols.push_back(static_cast<Symbol>(v));
            token.clear();
        };
        for (char c : text) {
            if (c == ' ' || c == '\t' || c == ',' || c == '\r' || c == '\n') flush();
            else token.push_back(c);
        }
        flush();
    }
    return Sequence(alphabet, std::move(symbols));
}

inline Sequence constant_sequence(Alphabet alphabet, Symbol s, std::size_t n) {
    return Sequence(alphabet, std::vector<Symbol>(n, s));
}

// ---------------------------------------------------------------------------
// Extended-real log-space arithmetic
// ---------------------------------------------------------------------------

/// log(exp(a) + exp(b)) with -inf as the additive identity.
inline double log_add(double a, double b) noexcept {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    if (a < b) std::swap(a, b);
    if (a == kInf) return kInf;
    return a + std::log1p(std::exp(b - a));
}

/// Stable log-sum-exp. Empty input and all -inf terms give -inf.
inline double log_sum_exp(std::span<const double> terms) noexcept {
    double hi = -kInf;
    for (double t : terms) hi = std::max(hi, t);
    if (hi == -kInf || hi == kInf) return hi;
    double acc = 0.0;
    for (double t : terms)
        if (t != -kInf) acc += std::exp(t - hi);
    return hi + std::log(acc);
}

/// Natural-log value rendered in the requested unit.
enum class Units { nats, bits };

inline double to_units(double nats, Units u) noexcept { return u == Units::bits ? nats / kLn2 : nats; }

inline const char* units_name(Units u) noexcept { return u == Units::bits ? "bits" : "nats"; }

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------
//
// std::mt19937_64 is fully specified by the standard; the distribution
// adaptors are not, so the transforms below are written out to keep streams
// identical across standard libraries.

using Rng = std::mt19937_64;

/// splitmix64 finalizer, used to derive independent per-item seeds.
inline std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for item `index` of stream `stream` under a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0) noexcept {
    return mix_seed(mix_seed(mix_seed(master) ^ stream) ^ index);
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by rejection (no modulo bias).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: empty range");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

/// Standard normal by Box-Muller (one variate per call).
inline double standard_normal(Rng& rng) noexcept {
    double u1;
    do {
        u1 = uniform01(rng);
    } while (u1 <= 0.0);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Index drawn from an (unnormalized) probability vector by inverse CDF.
inline std::size_t sample_categorical(Rng& rng, std::span<const double> probs) {
    double total = 0.0;
    for (double p : probs) total += p;
    const double u = uniform01(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    for (std::size_t i = probs.size(); i-- > 0;)
        if (probs[i] > 0.0) return i;
    return probs.size() - 1;
}

// ---------------------------------------------------------------------------
// Deterministic parallel loop
// ---------------------------------------------------------------------------

/// Runs body(i) for i in [0, n) on `workers` threads using a static
/// contiguous partition. Callers write results into per-index slots and
/// reduce in index order, so output does not depend on the worker count.
template <class Body>
void parallel_for(std::size_t n, std::size_t workers, Body&& body) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::size_t lo = w * chunk;
                const std::size_t hi = std::min(n, lo + chunk);
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        if (!std::isfinite(x) || !std::isfinite(sum_)) {
            sum_ += x;
            return;
        }
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
        else comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return std::isfinite(sum_) ? sum_ + comp_ : sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace realism
