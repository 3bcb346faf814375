#pragma once

// JSON experiment configuration. One document configures every subcommand;
// unknown keys are rejected and errors name the offending field path.
//
//   {
//     "seed": 1,                       required
//     "units": "nats" | "bits",        default "nats"
//     "alphabet": 2,                   default alphabet for model specs
//     "workers": 1,
//     "p_model": <model>,
//     "mixture": "default-zoo" | [<model>, ...],
//     "bounds":     { "q_model": <model>, "length": 20,
//                     "batch_sizes": [1, 4, 16, 64], "num_batches": 10000 },
//     "bench":      { "scenarios": [...], "length": 128, "n_per_class": 200,
//                     "batch": 8, "detectors": [...] },
//     "typicality": { "lengths": [...], "deltas": [...], "mc_samples": 1000 },
//     "enumerate":  { "length": 10, "delta": 0.05, "top": 10 },
//     "deficiency": { "codec": "order2" },
//     "optimize":   { "p": <gmm>, "s": <gmm>, "x0": [...], "step": 0.001,
//                     "steps": 100 }
//   }
//
//   <model> = { "kind": "iid-categorical" | "markov-order1" | "constant-symbol"
//                     | "periodic-pattern" | "uniform" | "memorized-dataset",
//               "alphabet": k, "description_bits": b, "name": "...",
//               "probs": [...], "transitions": [[...]], "initial": [...],
//               "symbol": s, "pattern": [...] | "0110",
//               "dataset": [[...] | "0101", ...] }
//   <gmm>   = { "components": [ { "weight": w, "mean": [...],
//                                 "variance": [...] }, ... ] }

#include <realism/bench.hpp>
#include <realism/continuous.hpp>
#include <realism/mixture.hpp>

#include <json.hpp>

#include <optional>
#include <set>

namespace realism {

using json = nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw config_error(path + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.count(key)) throw config_error(path + "." + key + ": unknown key");
}

template <class T>
T get_as(const json& v, const std::string& path) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw config_error(path + ": wrong type");
    }
}

template <class T>
T required(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) throw config_error(path + "." + key + ": missing required key");
    return get_as<T>(obj.at(key), path + "." + key);
}

template <class T>
T optional_or(const json& obj, const std::string& key, const std::string& path, T fallback) {
    if (!obj.contains(key)) return fallback;
    return get_as<T>(obj.at(key), path + "." + key);
}

inline std::vector<Symbol> symbols_from(const json& v, const std::string& path) {
    if (v.is_string()) {
        std::vector<Symbol> out;
        for (char c : v.get<std::string>()) {
            if (c < '0' || c > '9') throw config_error(path + ": invalid symbol character");
            out.push_back(static_cast<Symbol>(c - '0'));
        }
        return out;
    }
    return get_as<std::vector<Symbol>>(v, path);
}

}  // namespace detail

inline Model parse_model(const json& spec, const std::string& path, std::optional<std::size_t> default_alphabet) {
    detail::reject_unknown_keys(spec, path,
                                {"kind", "alphabet", "description_bits", "name", "probs", "transitions", "initial",
                                 "symbol", "pattern", "dataset"});
    const auto kind = detail::required<std::string>(spec, "kind", path);
    const double bits = detail::optional_or<double>(spec, "description_bits", path, 0.0);
    const auto name = detail::optional_or<std::string>(spec, "name", path, "");
    std::optional<std::size_t> k = default_alphabet;
    if (spec.contains("alphabet")) k = detail::get_as<std::size_t>(spec.at("alphabet"), path + ".alphabet");
    auto need_alphabet = [&]() -> Alphabet {
        if (!k) throw config_error(path + ".alphabet: missing (and no top-level alphabet)");
        try {
            return Alphabet(*k);
        } catch (const config_error& e) {
            throw config_error(path + ".alphabet: " + e.what());
        }
    };
    auto wrap = [&](auto&& make) -> Model {
        try {
            return make();
        } catch (const config_error& e) {
            throw config_error(path + ": " + e.what());
        } catch (const input_error& e) {
            throw config_error(path + ": " + e.what());
        }
    };
    auto only = [&](std::initializer_list<const char*> extra) {
        static const char* common[] = {"kind", "alphabet", "description_bits", "name"};
        std::set<std::string> ok(std::begin(common), std::end(common));
        ok.insert(extra.begin(), extra.end());
        for (const auto& [key, _] : spec.items())
            if (!ok.count(key)) throw config_error(path + "." + key + ": not valid for kind " + kind);
    };
    if (kind == "iid-categorical") {
        only({"probs"});
        auto probs = detail::required<std::vector<double>>(spec, "probs", path);
        if (!k) k = probs.size();
        const Alphabet a = need_alphabet();
        return wrap([&] { return Model::iid(a, probs, bits, name); });
    }
    if (kind == "markov-order1") {
        only({"transitions", "initial"});
        auto t = detail::required<std::vector<std::vector<double>>>(spec, "transitions", path);
        auto init = detail::optional_or<std::vector<double>>(spec, "initial", path, {});
        if (!k) k = t.size();
        const Alphabet a = need_alphabet();
        return wrap([&] { return Model::markov(a, t, init, bits, name); });
    }
    if (kind == "constant-symbol") {
        only({"symbol"});
        const auto s = detail::required<Symbol>(spec, "symbol", path);
        const Alphabet a = need_alphabet();
        return wrap([&] { return Model::constant(a, s, bits, name); });
    }
    if (kind == "periodic-pattern") {
        only({"pattern"});
        if (!spec.contains("pattern")) throw config_error(path + ".pattern: missing required key");
        auto pat = detail::symbols_from(spec.at("pattern"), path + ".pattern");
        const Alphabet a = need_alphabet();
        return wrap([&] { return Model::periodic(a, pat, bits, name); });
    }
    if (kind == "uniform") {
        only({});
        const Alphabet a = need_alphabet();
        return wrap([&] { return Model::uniform(a, bits, name); });
    }
    if (kind == "memorized-dataset") {
        only({"dataset"});
        if (!spec.contains("dataset") || !spec.at("dataset").is_array())
            throw config_error(path + ".dataset: expected an array of sequences");
        const Alphabet a = need_alphabet();
        std::vector<Sequence> data;
        for (std::size_t i = 0; i < spec.at("dataset").size(); ++i) {
            const auto p = path + ".dataset[" + std::to_string(i) + "]";
            auto sym = detail::symbols_from(spec.at("dataset")[i], p);
            try {
                data.emplace_back(a, std::move(sym));
            } catch (const input_error& e) {
                throw config_error(p + ": " + e.what());
            }
        }
        return wrap([&] { return Model::memorized(a, data, bits, name); });
    }
    throw config_error(path + ".kind: unknown model kind '" + kind + "'");
}

inline GaussianMixtureDensity parse_gmm(const json& spec, const std::string& path) {
    detail::reject_unknown_keys(spec, path, {"components"});
    if (!spec.contains("components") || !spec.at("components").is_array())
        throw config_error(path + ".components: expected an array");
    std::vector<GaussianComponent> comps;
    for (std::size_t i = 0; i < spec.at("components").size(); ++i) {
        const auto& c = spec.at("components")[i];
        const auto p = path + ".components[" + std::to_string(i) + "]";
        detail::reject_unknown_keys(c, p, {"weight", "mean", "variance"});
        const double w = detail::optional_or<double>(c, "weight", p, 1.0);
        if (!(w > 0.0)) throw config_error(p + ".weight: must be positive");
        comps.push_back({std::log(w), detail::required<Vector>(c, "mean", p), detail::required<Vector>(c, "variance", p)});
    }
    try {
        return GaussianMixtureDensity(std::move(comps));
    } catch (const config_error& e) {
        throw config_error(path + ": " + e.what());
    }
}

struct BoundsConfig {
    Model q_model;
    std::size_t length;
    std::vector<std::size_t> batch_sizes;
    std::size_t num_batches;
};

struct BenchConfig {
    std::vector<std::string> scenarios;
    std::size_t length;
    std::size_t n_per_class;
    std::size_t batch;
    std::vector<std::string> detectors;
};

struct TypicalityConfig {
    std::vector<std::size_t> lengths;
    std::vector<double> deltas;
    std::size_t mc_samples;
};

struct EnumerateConfig {
    std::size_t length;
    double delta;
    std::size_t top;
};

struct OptimizeConfig {
    GaussianMixtureDensity p;
    GaussianMixtureDensity s;
    Vector x0;
    double step;
    std::size_t steps;
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    Units units = Units::nats;
    std::size_t workers = 1;
    std::optional<std::size_t> alphabet;
    std::optional<Model> p_model;
    std::optional<Mixture> mixture;
    std::optional<BoundsConfig> bounds;
    std::optional<BenchConfig> bench;
    std::optional<TypicalityConfig> typicality;
    std::optional<EnumerateConfig> enumerate;
    std::optional<std::string> codec;
    std::optional<OptimizeConfig> optimize;

    const Model& require_p_model() const {
        if (!p_model) throw config_error("p_model: missing required key");
        return *p_model;
    }
    const Mixture& require_mixture() const {
        if (!mixture) throw config_error("mixture: missing required key");
        return *mixture;
    }
};

inline Units parse_units(const std::string& s) {
    if (s == "nats") return Units::nats;
    if (s == "bits") return Units::bits;
    throw config_error("units: expected 'bits' or 'nats', got '" + s + "'");
}

inline ExperimentConfig parse_config(const json& doc) {
    detail::reject_unknown_keys(doc, "config",
                                {"seed", "units", "alphabet", "workers", "p_model", "mixture", "bounds", "bench",
                                 "typicality", "enumerate", "deficiency", "optimize"});
    ExperimentConfig cfg;
    cfg.seed = detail::required<std::uint64_t>(doc, "seed", "config");
    cfg.units = parse_units(detail::optional_or<std::string>(doc, "units", "config", "nats"));
    cfg.workers = detail::optional_or<std::size_t>(doc, "workers", "config", 1);
    if (cfg.workers == 0) throw config_error("config.workers: must be positive");
    if (doc.contains("alphabet")) cfg.alphabet = detail::get_as<std::size_t>(doc.at("alphabet"), "config.alphabet");
    if (doc.contains("p_model")) cfg.p_model = parse_model(doc.at("p_model"), "config.p_model", cfg.alphabet);
    if (doc.contains("mixture")) {
        const auto& m = doc.at("mixture");
        if (m.is_string()) {
            if (m.get<std::string>() != "default-zoo") throw config_error("config.mixture: unknown preset");
            std::optional<std::size_t> k = cfg.alphabet;
            if (!k && cfg.p_model) k = cfg.p_model->alphabet().size();
            if (!k) throw config_error("config.mixture: default-zoo needs an alphabet");
            cfg.mixture = default_zoo_mixture(Alphabet(*k));
        } else if (m.is_array()) {
            std::vector<Model> models;
            for (std::size_t i = 0; i < m.size(); ++i) {
                const auto p = "config.mixture[" + std::to_string(i) + "]";
                if (!m[i].contains("description_bits")) throw config_error(p + ".description_bits: missing required key");
                models.push_back(parse_model(m[i], p, cfg.alphabet));
            }
            if (models.empty()) throw config_error("config.mixture: needs at least one component");
            try {
                cfg.mixture = prior_from_description_bits(models);
            } catch (const config_error& e) {
                throw config_error(std::string("config.mixture: ") + e.what());
            }
        } else {
            throw config_error("config.mixture: expected \"default-zoo\" or an array of models");
        }
    }
    if (doc.contains("bounds")) {
        const auto& b = doc.at("bounds");
        const std::string p = "config.bounds";
        detail::reject_unknown_keys(b, p, {"q_model", "length", "batch_sizes", "num_batches"});
        if (!b.contains("q_model")) throw config_error(p + ".q_model: missing required key");
        cfg.bounds = BoundsConfig{parse_model(b.at("q_model"), p + ".q_model", cfg.alphabet),
                                  detail::required<std::size_t>(b, "length", p),
                                  detail::optional_or<std::vector<std::size_t>>(b, "batch_sizes", p, {1, 4, 16, 64}),
                                  detail::optional_or<std::size_t>(b, "num_batches", p, 10000)};
    }
    if (doc.contains("bench")) {
        const auto& b = doc.at("bench");
        const std::string p = "config.bench";
        detail::reject_unknown_keys(b, p, {"scenarios", "length", "n_per_class", "batch", "detectors"});
        cfg.bench = BenchConfig{detail::optional_or<std::vector<std::string>>(b, "scenarios", p, scenario_names()),
                                detail::optional_or<std::size_t>(b, "length", p, 128),
                                detail::optional_or<std::size_t>(b, "n_per_class", p, 200),
                                detail::optional_or<std::size_t>(b, "batch", p, 8),
                                detail::optional_or<std::vector<std::string>>(
                                    b, "detectors", p,
                                    {"neg_log_p", "weak_typicality", "compression_deficiency", "universal_critic",
                                     "batched_critic"})};
    }
    if (doc.contains("typicality")) {
        const auto& t = doc.at("typicality");
        const std::string p = "config.typicality";
        detail::reject_unknown_keys(t, p, {"lengths", "deltas", "mc_samples"});
        cfg.typicality = TypicalityConfig{detail::required<std::vector<std::size_t>>(t, "lengths", p),
                                          detail::required<std::vector<double>>(t, "deltas", p),
                                          detail::optional_or<std::size_t>(t, "mc_samples", p, 1000)};
    }
    if (doc.contains("enumerate")) {
        const auto& e = doc.at("enumerate");
        const std::string p = "config.enumerate";
        detail::reject_unknown_keys(e, p, {"length", "delta", "top"});
        cfg.enumerate = EnumerateConfig{detail::required<std::size_t>(e, "length", p),
                                        detail::optional_or<double>(e, "delta", p, 0.05),
                                        detail::optional_or<std::size_t>(e, "top", p, 10)};
    }
    if (doc.contains("deficiency")) {
        const auto& d = doc.at("deficiency");
        detail::reject_unknown_keys(d, "config.deficiency", {"codec"});
        cfg.codec = detail::optional_or<std::string>(d, "codec", "config.deficiency", "order2");
        try {
            parse_codec(*cfg.codec);
        } catch (const std::exception& e) {
            throw config_error(std::string("config.deficiency.codec: ") + e.what());
        }
    }
    if (doc.contains("optimize")) {
        const auto& o = doc.at("optimize");
        const std::string p = "config.optimize";
        detail::reject_unknown_keys(o, p, {"p", "s", "x0", "step", "steps"});
        if (!o.contains("p") || !o.contains("s")) throw config_error(p + ": needs both 'p' and 's'");
        cfg.optimize = OptimizeConfig{parse_gmm(o.at("p"), p + ".p"), parse_gmm(o.at("s"), p + ".s"),
                                      detail::required<Vector>(o, "x0", p),
                                      detail::optional_or<double>(o, "step", p, 1e-3),
                                      detail::optional_or<std::size_t>(o, "steps", p, 100)};
        if (!(cfg.optimize->step > 0.0)) throw config_error(p + ".step: must be positive");
    }
    return cfg;
}

/// Parses a JSON document; syntax errors become config_error.
inline ExperimentConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

}  // namespace realism
