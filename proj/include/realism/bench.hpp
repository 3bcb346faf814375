#pragma once

// Detection benchmark: realistic samples from P against a fixed suite of
// corruptions, scored by probability, typicality, compression and critic
// detectors, summarized by ROC/AUC. Higher scores mean "more unrealistic";
// AUC is the probability that a corrupted item outscores a realistic one.

#include <realism/complexity.hpp>
#include <realism/critic.hpp>
#include <realism/typicality.hpp>

#include <algorithm>

namespace realism {

inline constexpr const char* kCorruptionSuiteVersion = "corruption-suite-v1";

struct RocResult {
    std::string detector;
    std::vector<std::pair<double, double>> points;  // (fpr, tpr), from (0,0) to (1,1)
    double auc;
};

/// ROC over all thresholds of the pooled scores. Equal scores form one step,
/// +inf ranks above every finite score. AUC by the trapezoid rule.
inline RocResult roc(std::span<const double> realistic, std::span<const double> unrealistic, std::string detector = {}) {
    if (realistic.empty() || unrealistic.empty()) throw input_error("roc needs scores for both classes");
    std::vector<std::pair<double, int>> pooled;
    pooled.reserve(realistic.size() + unrealistic.size());
    for (double v : realistic) pooled.emplace_back(v, 0);
    for (double v : unrealistic) pooled.emplace_back(v, 1);
    for (const auto& [v, c] : pooled)
        if (std::isnan(v)) throw input_error("roc scores must not be NaN");
    std::sort(pooled.begin(), pooled.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    const double nr = static_cast<double>(realistic.size()), nu = static_cast<double>(unrealistic.size());
    RocResult r{std::move(detector), {{0.0, 0.0}}, 0.0};
    std::size_t fp = 0, tp = 0;
    for (std::size_t i = 0; i < pooled.size();) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].first == pooled[i].first) {
            (pooled[j].second ? tp : fp) += 1;
            ++j;
        }
        const auto [x0, y0] = r.points.back();
        const double x1 = static_cast<double>(fp) / nr, y1 = static_cast<double>(tp) / nu;
        r.auc += (x1 - x0) * (y0 + y1) / 2.0;
        r.points.emplace_back(x1, y1);
        i = j;
    }
    return r;
}

enum class DetectorKind { neg_log_p, weak_typicality, compression_deficiency, universal_critic, batched_critic, likelihood_ratio };

struct Detector {
    DetectorKind kind;
    std::size_t batch = 1;      // batched_critic only
    std::size_t component = 0;  // likelihood_ratio only: index into the scenario mixture

    static Detector neg_log_p() { return {DetectorKind::neg_log_p}; }
    static Detector weak_typicality() { return {DetectorKind::weak_typicality}; }
    static Detector compression_deficiency() { return {DetectorKind::compression_deficiency}; }
    static Detector universal_critic() { return {DetectorKind::universal_critic}; }
    static Detector batched_critic(std::size_t b) { return {DetectorKind::batched_critic, b}; }
    static Detector likelihood_ratio(std::size_t component) { return {DetectorKind::likelihood_ratio, 1, component}; }
};

/// Parses "neg_log_p", "weak_typicality", "compression_deficiency",
/// "universal_critic", "batched_critic" (uses `default_batch`) or
/// "batched_critic:<B>".
inline Detector parse_detector(const std::string& s, std::size_t default_batch) {
    if (s == "neg_log_p") return Detector::neg_log_p();
    if (s == "weak_typicality") return Detector::weak_typicality();
    if (s == "compression_deficiency") return Detector::compression_deficiency();
    if (s == "universal_critic") return Detector::universal_critic();
    if (s == "batched_critic") return Detector::batched_critic(default_batch);
    if (s.rfind("batched_critic:", 0) == 0) {
        const auto b = std::stoul(s.substr(15));
        if (b == 0) throw config_error("batch size must be positive");
        return Detector::batched_critic(b);
    }
    throw config_error("unknown detector '" + s + "'");
}

enum class Corruption { constant, alternating, periodic, wrong_bias, memorized_duplicate };

struct Scenario {
    std::string name;
    Model p_model;
    Mixture mixture;  // the critic's alternatives S
    Corruption corruption;
    std::size_t length;
    std::vector<Sequence> training_set;  // memorized_duplicate only
};

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"all-zeros", "alternating", "periodic", "wrong-bias",
                                                "memorized-duplicate"};
    return names;
}

inline constexpr std::size_t kMemorizedTrainingSize = 4;

/// Builds one scenario of the fixed binary suite. P is the fair coin and S
/// the default zoo; the memorized scenario adds a memorized-dataset model
/// over a seeded training set, priced at |D| N log2 k + 8 bits.
inline Scenario make_scenario(const std::string& name, std::size_t length, std::uint64_t seed) {
    if (length == 0) throw config_error("scenario length must be positive");
    const Alphabet a = binary_alphabet();
    Model p = Model::uniform(a, 0.0, "fair-coin");
    auto zoo = default_zoo(a);
    Corruption c;
    std::vector<Sequence> train;
    if (name == "all-zeros") c = Corruption::constant;
    else if (name == "alternating") c = Corruption::alternating;
    else if (name == "periodic") c = Corruption::periodic;
    else if (name == "wrong-bias") c = Corruption::wrong_bias;
    else if (name == "memorized-duplicate") {
        c = Corruption::memorized_duplicate;
        for (std::size_t i = 0; i < kMemorizedTrainingSize; ++i) train.push_back(sample(p, length, derive_seed(seed, 0x7472, i)));
        const double bits = static_cast<double>(train.size() * length) * std::log2(static_cast<double>(a.size())) + 8.0;
        zoo.push_back(Model::memorized(a, train, bits, "memorized-training-set"));
    } else {
        throw config_error("unknown scenario '" + name + "'");
    }
    return {name, std::move(p), prior_from_description_bits(zoo), c, length, std::move(train)};
}

namespace detail {

inline constexpr std::uint64_t kRealisticStream = 0x5245;
inline constexpr std::uint64_t kUnrealisticStream = 0x554e;

/// A primitive binary pattern of period 3 or 4.
inline std::vector<Symbol> random_pattern(Rng& rng) {
    for (;;) {
        const std::size_t period = 3 + uniform_index(rng, 2);
        std::vector<Symbol> pat(period);
        for (auto& s : pat) s = static_cast<Symbol>(uniform_index(rng, 2));
        if (is_primitive_pattern(pat)) return pat;
    }
}

/// Item `index` of the realistic or corrupted class. For the memorized
/// scenario a batch repeats one training sequence, selected by `group`.
inline Sequence scenario_item(const Scenario& sc, bool unrealistic, std::uint64_t item_seed, std::uint64_t group_seed) {
    const Alphabet& a = sc.p_model.alphabet();
    if (!unrealistic) return sample(sc.p_model, sc.length, item_seed);
    switch (sc.corruption) {
        case Corruption::constant: return constant_sequence(a, 0, sc.length);
        case Corruption::alternating: return sample(Model::periodic(a, {0, 1}), sc.length, 0);
        case Corruption::periodic: {
            Rng rng(item_seed);
            return sample(Model::periodic(a, random_pattern(rng)), sc.length, 0);
        }
        case Corruption::wrong_bias: return sample(Model::bernoulli(0.8), sc.length, item_seed);
        case Corruption::memorized_duplicate: {
            Rng rng(group_seed);
            return sc.training_set[uniform_index(rng, sc.training_set.size())];
        }
    }
    throw config_error("unknown corruption");
}

inline double detector_score(const Detector& d, const Scenario& sc, std::span<const Sequence> items) {
    const Model& p = sc.p_model;
    const Sequence& x = items.front();
    switch (d.kind) {
        case DetectorKind::neg_log_p: return -log_prob(p, x);
        case DetectorKind::weak_typicality: return std::abs(per_symbol_neg_log_prob(p, x) - entropy_rate(p));
        case DetectorKind::compression_deficiency: {
            if (x.alphabet().size() > 256) throw input_error("compression detector needs at most 256 symbols");
            std::vector<std::uint8_t> bytes(x.symbols().begin(), x.symbols().end());
            const double nlp = -log_prob(p, x) / kLn2;
            return std::isinf(nlp) ? kInf : nlp - static_cast<double>(compress(Codec::adaptive(2), bytes).bits);
        }
        case DetectorKind::universal_critic: return universal_critic(p, sc.mixture, x).u;
        case DetectorKind::batched_critic: {
            double lp = 0.0;
            for (const auto& it : items) lp += log_prob(p, it);
            return deficiency(batch_log_mix_prob(sc.mixture, items), lp);
        }
        case DetectorKind::likelihood_ratio: {
            const auto& m = sc.mixture[d.component].model;
            return deficiency(log_prob(m, x), log_prob(p, x));
        }
    }
    throw config_error("unknown detector");
}

}  // namespace detail

inline std::string detector_name(const Detector& d, const Scenario& sc) {
    switch (d.kind) {
        case DetectorKind::neg_log_p: return "neg_log_p";
        case DetectorKind::weak_typicality: return "weak_typicality";
        case DetectorKind::compression_deficiency: return "compression_deficiency";
        case DetectorKind::universal_critic: return "universal_critic";
        case DetectorKind::batched_critic: return "batched_critic_B" + std::to_string(d.batch);
        case DetectorKind::likelihood_ratio: return "likelihood_ratio:" + sc.mixture[d.component].model.name();
    }
    return "?";
}

struct DetectorScores {
    std::vector<double> realistic, unrealistic;
};

/// Scores n_per_class items (batches for the batched critic) of each class.
/// Item i of a class is generated from seeds derived from (seed, class, i)
/// alone, so scores do not depend on `workers`.
inline DetectorScores score_detector(const Scenario& sc, const Detector& d, std::size_t n_per_class, std::uint64_t seed,
                                     std::size_t workers = 1) {
    if (d.kind == DetectorKind::likelihood_ratio && d.component >= sc.mixture.size())
        throw config_error("likelihood_ratio component out of range");
    const std::size_t b = d.kind == DetectorKind::batched_critic ? d.batch : 1;
    DetectorScores out{std::vector<double>(n_per_class), std::vector<double>(n_per_class)};
    for (int cls = 0; cls < 2; ++cls) {
        const std::uint64_t stream = cls ? detail::kUnrealisticStream : detail::kRealisticStream;
        auto& dst = cls ? out.unrealistic : out.realistic;
        parallel_for(n_per_class, workers, [&](std::size_t i) {
            const std::uint64_t group = derive_seed(seed, stream ^ (b << 16), i);
            std::vector<Sequence> items;
            items.reserve(b);
            for (std::size_t k = 0; k < b; ++k) items.push_back(detail::scenario_item(sc, cls == 1, derive_seed(group, k), group));
            dst[i] = detail::detector_score(d, sc, items);
        });
    }
    return out;
}

inline std::vector<RocResult> run_scenario(const Scenario& sc, std::span<const Detector> detectors,
                                           std::size_t n_per_class, std::uint64_t seed, std::size_t workers = 1) {
    if (n_per_class < 10) throw config_error("n_per_class must be at least 10");
    std::vector<RocResult> out;
    for (const auto& d : detectors) {
        const auto s = score_detector(sc, d, n_per_class, seed, workers);
        out.push_back(roc(s.realistic, s.unrealistic, detector_name(d, sc)));
    }
    return out;
}

inline std::vector<Detector> default_detectors(std::size_t batch) {
    return {Detector::neg_log_p(), Detector::weak_typicality(), Detector::compression_deficiency(),
            Detector::universal_critic(), Detector::batched_critic(batch)};
}

}  // namespace realism
