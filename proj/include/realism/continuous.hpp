#pragma once

// Continuous counterpart of the critic: diagonal Gaussian mixtures with
// closed-form scores, Langevin and deterministic probability-flow updates,
// gradient descent on the continuous deficiency log S(x) - log P(x), and the
// typicality gradient of an isotropic Gaussian.

#include <realism/core.hpp>

#include <numbers>
#include <vector>

namespace realism {

using Vector = std::vector<double>;

struct GaussianComponent {
    double log_weight;
    Vector mean;
    Vector variance;  // diagonal covariance
};

class GaussianMixtureDensity {
public:
    explicit GaussianMixtureDensity(std::vector<GaussianComponent> components) : components_(std::move(components)) {
        if (components_.empty()) throw config_error("gaussian mixture needs at least one component");
        dim_ = components_.front().mean.size();
        if (dim_ == 0) throw config_error("gaussian mixture dimension must be positive");
        std::vector<double> w;
        for (const auto& c : components_) {
            if (c.mean.size() != dim_ || c.variance.size() != dim_)
                throw config_error("gaussian mixture components disagree on dimension");
            for (double v : c.variance)
                if (!(v > 0.0) || !std::isfinite(v)) throw config_error("variances must be positive and finite");
            for (double m : c.mean)
                if (!std::isfinite(m)) throw config_error("means must be finite");
            if (std::isnan(c.log_weight) || c.log_weight == kInf) throw config_error("invalid log weight");
            w.push_back(c.log_weight);
        }
        if (log_sum_exp(w) > std::log1p(1e-12)) throw config_error("gaussian mixture weights sum above 1");
    }

    /// Single isotropic or diagonal Gaussian with weight 1.
    static GaussianMixtureDensity gaussian(Vector mean, Vector variance) {
        return GaussianMixtureDensity({{0.0, std::move(mean), std::move(variance)}});
    }
    static GaussianMixtureDensity standard_normal(std::size_t d) {
        return gaussian(Vector(d, 0.0), Vector(d, 1.0));
    }

    std::size_t dimension() const noexcept { return dim_; }
    std::span<const GaussianComponent> components() const noexcept { return components_; }

private:
    std::vector<GaussianComponent> components_;
    std::size_t dim_ = 0;
};

namespace detail {

inline void check_dimension(const GaussianMixtureDensity& q, std::span<const double> x) {
    if (x.size() != q.dimension())
        throw input_error("dimension mismatch: density has " + std::to_string(q.dimension()) + ", point has " +
                          std::to_string(x.size()));
}

inline double gaussian_log_density(const GaussianComponent& c, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - c.mean[i];
        s += std::log(2.0 * std::numbers::pi * c.variance[i]) + d * d / c.variance[i];
    }
    return -0.5 * s;
}

inline std::vector<double> weighted_terms(const GaussianMixtureDensity& q, std::span<const double> x) {
    std::vector<double> t;
    t.reserve(q.components().size());
    for (const auto& c : q.components()) t.push_back(c.log_weight + gaussian_log_density(c, x));
    return t;
}

}  // namespace detail

inline double log_density(const GaussianMixtureDensity& q, std::span<const double> x) {
    detail::check_dimension(q, x);
    return log_sum_exp(detail::weighted_terms(q, x));
}

/// Posterior responsibilities P(n | x) proportional to w_n q_n(x).
inline std::vector<double> responsibilities(const GaussianMixtureDensity& q, std::span<const double> x) {
    detail::check_dimension(q, x);
    auto t = detail::weighted_terms(q, x);
    const double z = log_sum_exp(t);
    if (z == -kInf) throw input_error("mixture density is numerically zero at the query point");
    for (double& v : t) v = std::exp(v - z);
    return t;
}

/// sum_n P(n | x) grad log q_n(x), which equals grad log sum_n w_n q_n(x).
inline Vector posterior_weighted_grad(const GaussianMixtureDensity& q, std::span<const double> x) {
    const auto r = responsibilities(q, x);
    Vector g(x.size(), 0.0);
    for (std::size_t n = 0; n < r.size(); ++n) {
        if (r[n] == 0.0) continue;
        const auto& c = q.components()[n];
        for (std::size_t i = 0; i < x.size(); ++i) g[i] -= r[n] * (x[i] - c.mean[i]) / c.variance[i];
    }
    return g;
}

struct FlowState {
    Vector position;
    double step;
    std::int64_t t = 0;
};

struct LangevinOutcome {
    FlowState state;
    bool accepted;
};

namespace detail {

inline double langevin_log_proposal(const GaussianMixtureDensity& p, std::span<const double> to,
                                     std::span<const double> from, double eps) {
    const auto g = posterior_weighted_grad(p, from);
    double s = 0.0;
    for (std::size_t i = 0; i < to.size(); ++i) {
        const double d = to[i] - from[i] - eps * g[i];
        s += d * d;
    }
    return -s / (4.0 * eps);
}

}  // namespace detail

/// One Langevin update x + eps grad log p(x) + sqrt(2 eps) eta with
/// eta ~ N(0, I) drawn from `seed`. With `metropolis` the proposal is
/// accepted or rejected so that p is exactly stationary (MALA).
inline LangevinOutcome langevin_step(const GaussianMixtureDensity& p, const FlowState& state, std::uint64_t seed,
                                     bool metropolis = false) {
    if (!(state.step > 0.0)) throw config_error("step size must be positive");
    const auto& x = state.position;
    detail::check_dimension(p, x);
    Rng rng(seed);
    const auto g = posterior_weighted_grad(p, x);
    const double noise = std::sqrt(2.0 * state.step);
    Vector y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + state.step * g[i] + noise * standard_normal(rng);
    bool accept = true;
    if (metropolis) {
        const double log_alpha = log_density(p, y) - log_density(p, x) +
                                 detail::langevin_log_proposal(p, x, y, state.step) -
                                 detail::langevin_log_proposal(p, y, x, state.step);
        accept = log_alpha >= 0.0 || uniform01(rng) < std::exp(log_alpha);
    }
    return {{accept ? std::move(y) : x, state.step, state.t + 1}, accept};
}

struct ChainSummary {
    Vector mean;
    Vector variance;
    double acceptance_rate;
    FlowState final_state;
};

/// Runs `steps` Langevin updates with per-step seeds derived from `seed` and
/// returns running moments of the visited states (Welford).
inline ChainSummary run_langevin(const GaussianMixtureDensity& p, Vector x0, double eps, std::size_t steps,
                                 std::uint64_t seed, bool metropolis) {
    FlowState s{std::move(x0), eps, 0};
    const std::size_t d = s.position.size();
    Vector mean(d, 0.0), m2(d, 0.0);
    std::size_t accepted = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        auto out = langevin_step(p, s, derive_seed(seed, 0x4c47, k), metropolis);
        accepted += out.accepted;
        s = std::move(out.state);
        for (std::size_t i = 0; i < d; ++i) {
            const double delta = s.position[i] - mean[i];
            mean[i] += delta / static_cast<double>(k + 1);
            m2[i] += delta * (s.position[i] - mean[i]);
        }
    }
    Vector var(d);
    for (std::size_t i = 0; i < d; ++i) var[i] = steps > 1 ? m2[i] / static_cast<double>(steps - 1) : 0.0;
    return {mean, var, steps ? static_cast<double>(accepted) / static_cast<double>(steps) : 0.0, s};
}

/// Noise-free flow x + eps (grad log p(x) - grad log q_t(x)).
inline FlowState deterministic_flow_step(const GaussianMixtureDensity& p, const GaussianMixtureDensity& q_t,
                                         const FlowState& state) {
    const auto gp = posterior_weighted_grad(p, state.position);
    const auto gq = posterior_weighted_grad(q_t, state.position);
    FlowState next{state.position, state.step, state.t + 1};
    for (std::size_t i = 0; i < gp.size(); ++i) next.position[i] += state.step * (gp[i] - gq[i]);
    return next;
}

// ---------------------------------------------------------------------------
// Typicality gradient for p(x) proportional to exp(-|x|^2)
// ---------------------------------------------------------------------------
//
// -log p(x) = |x|^2 + (d/2) ln(pi) and H = (d/2)(1 + ln(pi)), so the squared
// deviation from typicality is (|x|^2 - d/2)^2 and its gradient is
// 4 (|x|^2 - d/2) x: always a multiple of x.

inline double typicality_deviation(std::span<const double> x) {
    double sq = 0.0;
    for (double v : x) sq += v * v;
    return sq - 0.5 * static_cast<double>(x.size());
}

/// Gradient of (-log p(x) - H)^2. Zero at x = 0 and on the shell |x|^2 = d/2.
inline Vector typicality_gradient(std::span<const double> x) {
    const double scale = 4.0 * typicality_deviation(x);
    Vector g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = scale * x[i];
    return g;
}

// ---------------------------------------------------------------------------
// Realism descent
// ---------------------------------------------------------------------------

struct Trajectory {
    std::vector<Vector> points;
    std::vector<double> u, log_p, log_s;
    bool diverged = false;
};

inline constexpr double kDivergenceNorm = 1e6;

/// Gradient descent on U(x) = log S(x) - log P(x):
///   x <- x - eps (grad log S(x) - grad log P(x)).
/// Records steps + 1 points unless the iterate leaves the ball of radius 1e6
/// (or becomes non-finite), in which case the trajectory stops and is flagged.
inline Trajectory realism_descent(const GaussianMixtureDensity& p, const GaussianMixtureDensity& s, Vector x0,
                                  double eps, std::size_t steps) {
    if (!(eps > 0.0)) throw config_error("step size must be positive");
    if (p.dimension() != s.dimension()) throw input_error("P and S disagree on dimension");
    detail::check_dimension(p, x0);
    Trajectory tr;
    auto record = [&](const Vector& x) {
        const double lp = log_density(p, x), ls = log_density(s, x);
        tr.points.push_back(x);
        tr.log_p.push_back(lp);
        tr.log_s.push_back(ls);
        tr.u.push_back(ls - lp);
    };
    Vector x = std::move(x0);
    record(x);
    for (std::size_t k = 0; k < steps; ++k) {
        const auto gs = posterior_weighted_grad(s, x);
        const auto gp = posterior_weighted_grad(p, x);
        double norm = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] -= eps * (gs[i] - gp[i]);
            norm += x[i] * x[i];
        }
        if (!std::isfinite(norm) || std::sqrt(norm) > kDivergenceNorm) {
            tr.diverged = true;
            break;
        }
        record(x);
    }
    return tr;
}

}  // namespace realism
