// critic: command-line front end for the realism library.
//
// Exit codes: 0 ok, 2 configuration error, 3 input error, 4 runtime divergence.

#include <realism/config.hpp>
#include <realism/divergence.hpp>
#include <realism/realism.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace {

using namespace realism;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitDivergence = 4;

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> units;
    std::optional<std::size_t> batch;
    std::optional<std::size_t> workers;
    std::string out_path;
    std::string input_path;
    std::string sequence;
    std::string codec;
    std::string roc_out;
    bool decompress = false;
};

std::string read_file(const std::string& path, bool binary) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw input_error("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ExperimentConfig load_config(const Options& o) {
    if (o.config_path.empty()) throw config_error("--config is required for this subcommand");
    std::ifstream in(o.config_path);
    if (!in) throw config_error("cannot open config '" + o.config_path + "'");
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    auto cfg = parse_config_text(text);
    if (o.seed) cfg.seed = *o.seed;
    if (o.units) cfg.units = parse_units(*o.units);
    if (o.workers) {
        if (*o.workers == 0) throw config_error("--workers must be positive");
        cfg.workers = *o.workers;
    }
    return cfg;
}

std::string header(const std::string& cmd, const ExperimentConfig& cfg) {
    return "# critic " + cmd + " seed=" + std::to_string(cfg.seed) + " units=" + units_name(cfg.units) + "\n";
}

void emit(const Options& o, const std::string& text) {
    if (o.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(o.out_path, std::ios::binary);
    if (!out) throw input_error("cannot write '" + o.out_path + "'");
    out << text;
}

std::vector<Sequence> read_sequences(const Options& o, const Alphabet& a) {
    std::vector<Sequence> out;
    auto add = [&](const std::string& line) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) return;
        out.push_back(parse_sequence(line, a));
    };
    if (!o.sequence.empty()) add(o.sequence);
    if (!o.input_path.empty()) {
        std::istringstream in(read_file(o.input_path, false));
        for (std::string line; std::getline(in, line);) add(line);
    }
    if (out.empty()) throw input_error("no input sequence (use --sequence or --input)");
    return out;
}

std::string u_col(const char* name, Units u) { return std::string(name) + "_" + units_name(u); }

// --- subcommands -------------------------------------------------------------

int cmd_score(const Options& o) {
    const auto cfg = load_config(o);
    const Model& p = cfg.require_p_model();
    const Mixture& s = cfg.require_mixture();
    const auto seqs = read_sequences(o, p.alphabet());
    const Units u = cfg.units;
    std::string out = header("score", cfg);
    if (o.batch) {
        if (*o.batch == 0 || *o.batch > seqs.size())
            throw input_error("--batch " + std::to_string(*o.batch) + " needs that many input sequences");
        const std::span<const Sequence> batch(seqs.data(), *o.batch);
        const auto r = batched_critic(p, s, batch);
        out += "step,log_p,u\n";
        for (std::size_t b = 0; b < batch.size(); ++b)
            out += std::to_string(b + 1) + "," + fmt(to_units(log_prob(p, batch[b]), u)) + "," +
                   fmt(to_units((*r.per_step)[b], u)) + "\n";
        out += "batch," + fmt(to_units(r.log_p, u)) + "," + fmt(to_units(r.u, u)) + "\n";
    } else {
        out += "index,log_p,log_s,u\n";
        for (std::size_t i = 0; i < seqs.size(); ++i) {
            const auto r = universal_critic(p, s, seqs[i]);
            out += std::to_string(i) + "," + fmt(to_units(r.log_p, u)) + "," + fmt(to_units(r.log_s, u)) + "," +
                   fmt(to_units(r.u, u)) + "\n";
        }
    }
    emit(o, out);
    return kExitOk;
}

int cmd_bounds(const Options& o) {
    const auto cfg = load_config(o);
    if (!cfg.bounds) throw config_error("config.bounds: missing required section");
    const Model& p = cfg.require_p_model();
    const Mixture& s = cfg.require_mixture();
    const auto& b = *cfg.bounds;
    const Units u = cfg.units;
    std::string out = header("bounds", cfg);
    out += "B," + u_col("kl", u) + "," + u_col("lower", u) + "," + u_col("estimate", u) + "," + u_col("std_error", u) + "\n";
    for (std::size_t bs : b.batch_sizes) {
        const auto r = sandwich_verify(b.q_model, p, s, b.length, bs, b.num_batches, cfg.seed, cfg.workers);
        out += std::to_string(bs) + "," + fmt(to_units(r.kl, u)) + "," + fmt(to_units(r.lower, u)) + "," +
               fmt(to_units(r.estimate, u)) + "," + fmt(to_units(r.std_error, u)) + "\n";
    }
    emit(o, out);
    return kExitOk;
}

int cmd_bench(const Options& o) {
    const auto cfg = load_config(o);
    if (!cfg.bench) throw config_error("config.bench: missing required section");
    const auto& b = *cfg.bench;
    const std::size_t batch = o.batch.value_or(b.batch);
    std::vector<Detector> detectors;
    for (const auto& d : b.detectors) detectors.push_back(parse_detector(d, batch));
    std::string out = header("bench", cfg);
    out += std::string("# suite=") + kCorruptionSuiteVersion + " length=" + std::to_string(b.length) +
           " n_per_class=" + std::to_string(b.n_per_class) + "\n";
    out += "scenario,detector,auc\n";
    std::string roc_dump = header("bench-roc", cfg) + "scenario,detector,fpr,tpr\n";
    for (const auto& name : b.scenarios) {
        const auto sc = make_scenario(name, b.length, cfg.seed);
        for (const auto& r : run_scenario(sc, detectors, b.n_per_class, cfg.seed, cfg.workers)) {
            out += name + "," + r.detector + "," + fmt(r.auc) + "\n";
            for (const auto& [x, y] : r.points) roc_dump += name + "," + r.detector + "," + fmt(x) + "," + fmt(y) + "\n";
        }
    }
    if (!o.roc_out.empty()) {
        std::ofstream f(o.roc_out, std::ios::binary);
        if (!f) throw input_error("cannot write '" + o.roc_out + "'");
        f << roc_dump;
    }
    emit(o, out);
    return kExitOk;
}

int cmd_optimize(const Options& o) {
    const auto cfg = load_config(o);
    if (!cfg.optimize) throw config_error("config.optimize: missing required section");
    const auto& opt = *cfg.optimize;
    const auto tr = realism_descent(opt.p, opt.s, opt.x0, opt.step, opt.steps);
    const Units u = cfg.units;
    std::string out = header("optimize", cfg);
    if (tr.diverged) out += "# diverged=true\n";
    out += "t";
    for (std::size_t i = 0; i < opt.x0.size(); ++i) out += ",x" + std::to_string(i);
    out += "," + u_col("U", u) + "," + u_col("log_p", u) + "," + u_col("log_s", u) + "\n";
    for (std::size_t t = 0; t < tr.points.size(); ++t) {
        out += std::to_string(t);
        for (double v : tr.points[t]) out += "," + fmt(v);
        out += "," + fmt(to_units(tr.u[t], u)) + "," + fmt(to_units(tr.log_p[t], u)) + "," + fmt(to_units(tr.log_s[t], u)) + "\n";
    }
    emit(o, out);
    if (tr.diverged) {
        std::cerr << "critic: optimization diverged after " << tr.points.size() - 1 << " steps\n";
        return kExitDivergence;
    }
    return kExitOk;
}

int cmd_typicality(const Options& o) {
    const auto cfg = load_config(o);
    if (!cfg.typicality) throw config_error("config.typicality: missing required section");
    const Model& p = cfg.require_p_model();
    const auto& t = *cfg.typicality;
    const Units u = cfg.units;
    const double per_unit = u == Units::bits ? kLn2 : 1.0;
    std::string out = header("typicality", cfg);
    out += "N," + u_col("delta", u) + ",count,bound,membership_rate\n";
    for (std::size_t n : t.lengths) {
        for (double d : t.deltas) {
            const double delta = d * per_unit;
            std::string count = "NA", bound = fmt(std::exp2(static_cast<double>(n) * (entropy_rate(p) + delta) / kLn2));
            try {
                const auto c = enumerate_typical_set(p, n, delta, cfg.workers);
                count = std::to_string(c.count);
                bound = fmt(c.bound);
            } catch (const budget_error&) {
            }
            const double rate = typical_membership_rate(p, n, delta, t.mc_samples, cfg.seed, cfg.workers);
            out += std::to_string(n) + "," + fmt(d) + "," + count + "," + bound + "," + fmt(rate) + "\n";
        }
    }
    emit(o, out);
    return kExitOk;
}

int cmd_deficiency(const Options& o) {
    const auto cfg = load_config(o);
    const Model& p = cfg.require_p_model();
    if (o.input_path.empty()) throw input_error("--input is required");
    const std::string raw = read_file(o.input_path, true);
    if (raw.empty()) throw input_error("input file is empty");
    const std::vector<std::uint8_t> bytes(raw.begin(), raw.end());
    const Codec codec = parse_codec(!o.codec.empty() ? o.codec : cfg.codec.value_or("order2"));
    const auto d = compression_deficiency(p, bytes, codec);
    const Units u = cfg.units;
    const double to_nats = kLn2;
    std::string out = header("deficiency", cfg);
    out += "codec," + u_col("neg_log_p", u) + "," + u_col("code_length", u) + "," + u_col("deficiency", u) + "\n";
    out += codec.name() + "," + fmt(to_units(d.neg_log_p_bits * to_nats, u)) + "," +
           fmt(to_units(static_cast<double>(d.code_bits) * to_nats, u)) + "," +
           fmt(to_units(d.deficiency_bits * to_nats, u)) + "\n";
    emit(o, out);
    return kExitOk;
}

int cmd_compress(const Options& o) {
    if (o.input_path.empty()) throw input_error("--input is required");
    const std::string raw = read_file(o.input_path, true);
    const std::vector<std::uint8_t> bytes(raw.begin(), raw.end());
    if (o.decompress) {
        const auto data = decompress(bytes);
        if (o.out_path.empty()) throw input_error("--out is required with --decompress");
        std::ofstream f(o.out_path, std::ios::binary);
        if (!f) throw input_error("cannot write '" + o.out_path + "'");
        f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
        std::cout << "codec,code_bytes,output_bytes\n"
                  << Codec::from_id(bytes[0]).name() << "," << bytes.size() << "," << data.size() << "\n";
        return kExitOk;
    }
    const Codec codec = parse_codec(o.codec.empty() ? "order2" : o.codec);
    const auto code = compress(codec, bytes);
    if (!o.out_path.empty()) {
        std::ofstream f(o.out_path, std::ios::binary);
        if (!f) throw input_error("cannot write '" + o.out_path + "'");
        f.write(reinterpret_cast<const char*>(code.bytes.data()), static_cast<std::streamsize>(code.bytes.size()));
    }
    std::cout << "codec,input_bytes,code_bits\n" << codec.name() << "," << bytes.size() << "," << code.bits << "\n";
    return kExitOk;
}

int cmd_enumerate(const Options& o) {
    const auto cfg = load_config(o);
    if (!cfg.enumerate) throw config_error("config.enumerate: missing required section");
    const Model& p = cfg.require_p_model();
    const auto& e = *cfg.enumerate;
    const Units u = cfg.units;
    const double delta = e.delta * (u == Units::bits ? kLn2 : 1.0);
    std::vector<std::pair<double, Sequence>> all;
    for_each_sequence(p.alphabet(), e.length, [&](const Sequence& x) { all.emplace_back(log_prob(p, x), x); });
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::string out = header("enumerate", cfg);
    std::optional<double> h;
    try {
        h = entropy_rate(p);
        const auto c = enumerate_typical_set(p, e.length, delta, cfg.workers);
        out += "# typical_count=" + std::to_string(c.count) + " total=" + std::to_string(c.total) +
               " bound=" + fmt(c.bound) + "\n";
    } catch (const unsupported_error&) {
    }
    out += "rank,sequence," + u_col("log_p", u) + ",typical\n";
    for (std::size_t r = 0; r < std::min(e.top, all.size()); ++r) {
        const auto& [lp, x] = all[r];
        std::string typical = "NA";
        if (h) typical = std::abs(per_symbol_neg_log_prob(p, x) - *h) < delta ? "1" : "0";
        out += std::to_string(r + 1) + "," + x.to_string() + "," + fmt(to_units(lp, u)) + "," + typical + "\n";
    }
    emit(o, out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"critic: universal critics, typicality baselines and bound verification"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub, bool needs_config = true) {
        auto* c = sub->add_option("--config", o.config_path, "JSON experiment configuration");
        if (needs_config) c->required();
        sub->add_option("--seed", o.seed, "Override the configured master seed");
        sub->add_option("--units", o.units, "Output units")->check(CLI::IsMember({"bits", "nats"}));
        sub->add_option("--workers", o.workers, "Worker threads (results do not depend on this)");
        sub->add_option("--out", o.out_path, "Write output here instead of stdout");
    };

    auto* score = app.add_subcommand("score", "Universal or batched critic score of input sequences");
    common(score);
    score->add_option("--input", o.input_path, "File with one sequence per line");
    score->add_option("--sequence", o.sequence, "Inline sequence, e.g. 0101");
    score->add_option("--batch", o.batch, "Score the first B sequences as one batch");

    auto* bounds = app.add_subcommand("bounds", "Monte Carlo sandwich bounds of the batched critic");
    common(bounds);

    auto* bench = app.add_subcommand("bench", "Detection benchmark (ROC/AUC per scenario and detector)");
    common(bench);
    bench->add_option("--batch", o.batch, "Batch size of the batched critic");
    bench->add_option("--roc-out", o.roc_out, "Per-threshold ROC dump");

    auto* optimize = app.add_subcommand("optimize", "Gradient descent on the continuous critic");
    common(optimize);

    auto* typ = app.add_subcommand("typicality", "Typical-set counts, bounds and membership rates");
    common(typ);

    auto* def = app.add_subcommand("deficiency", "Compression deficiency -log P(x) - C(x) of a file");
    common(def);
    def->add_option("--input", o.input_path, "Raw input file")->required();
    def->add_option("--codec", o.codec, "store, rle, lz, lz<w>, order0, order1, order2");

    auto* comp = app.add_subcommand("compress", "Compress (or --decompress) a raw file");
    common(comp, false);
    comp->add_option("--input", o.input_path, "Raw input file")->required();
    comp->add_option("--codec", o.codec, "store, rle, lz, lz<w>, order0, order1, order2");
    comp->add_flag("--decompress", o.decompress, "Decode a code file");

    auto* en = app.add_subcommand("enumerate", "Enumerate all sequences of a length under P");
    common(en);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*score) return cmd_score(o);
        if (*bounds) return cmd_bounds(o);
        if (*bench) return cmd_bench(o);
        if (*optimize) return cmd_optimize(o);
        if (*typ) return cmd_typicality(o);
        if (*def) return cmd_deficiency(o);
        if (*comp) return cmd_compress(o);
        if (*en) return cmd_enumerate(o);
    } catch (const config_error& e) {
        std::cerr << "critic: configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const realism::error& e) {
        std::cerr << "critic: input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "critic: input error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
