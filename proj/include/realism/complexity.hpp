#pragma once

// Deterministic lossless codecs used as a computable stand-in for Kolmogorov
// complexity, and the compression deficiency -log2 P(x) - C(x).
//
// Container: 1 byte codec id, 4 byte big-endian payload length, payload.
// The 40 header bits are counted in C(x).
//
//   id 0x00        store       raw bytes
//   id 0x01        rle         (run length - 1 : 8 bits, byte : 8 bits) pairs
//   id 0x40 + w    lz-window   window 2^w bytes, w in [8, 16]; bit tokens
//                              0 + literal(8) | 1 + offset-1(w) + length-3(8)
//   id 0x30 | k    adaptive    order-k (k in 0..2) bitwise context model
//                              driving a 32-bit binary arithmetic coder
//
// Arithmetic coder: range [x1, x2] of 32-bit integers, 12-bit probabilities,
// xmid = x1 + ((x2 - x1) >> 12) * p1; bit 1 keeps [x1, xmid], bit 0 keeps
// [xmid + 1, x2]; while the top bytes agree the top byte of x2 is emitted and
// both bounds shift left by 8 (x2 filled with 1s). Flush emits the top byte
// of x1; the decoder reads 0xFF past the end of the stream.

#include <realism/models.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace realism {

enum class CodecKind { store, rle, lz_window, adaptive };

struct Codec {
    CodecKind kind = CodecKind::adaptive;
    unsigned window_log2 = 12;  // lz-window only
    unsigned order = 2;         // adaptive only

    static Codec store() { return {CodecKind::store, 12, 0}; }
    static Codec rle() { return {CodecKind::rle, 12, 0}; }
    static Codec lz(unsigned window_log2 = 12) { return {CodecKind::lz_window, window_log2, 0}; }
    static Codec adaptive(unsigned order = 2) { return {CodecKind::adaptive, 12, order}; }

    std::uint8_t id() const {
        switch (kind) {
            case CodecKind::store: return 0x00;
            case CodecKind::rle: return 0x01;
            case CodecKind::lz_window:
                if (window_log2 < 8 || window_log2 > 16) throw config_error("lz window must be 2^8 .. 2^16");
                return static_cast<std::uint8_t>(0x40 + window_log2);
            case CodecKind::adaptive:
                if (order > 2) throw config_error("adaptive codec order must be 0, 1 or 2");
                return static_cast<std::uint8_t>(0x30 | order);
        }
        throw config_error("unknown codec");
    }

    static Codec from_id(std::uint8_t id) {
        if (id == 0x00) return store();
        if (id == 0x01) return rle();
        if (id >= 0x48 && id <= 0x50) return lz(id - 0x40u);
        if ((id & 0xf0) == 0x30 && (id & 0x0f) <= 2) return adaptive(id & 0x0f);
        throw input_error("unknown codec id in stream");
    }

    std::string name() const {
        switch (kind) {
            case CodecKind::store: return "store";
            case CodecKind::rle: return "rle";
            case CodecKind::lz_window: return "lz" + std::to_string(window_log2);
            case CodecKind::adaptive: return "order" + std::to_string(order);
        }
        return "?";
    }
};

/// Parses "store", "rle", "lz", "lz<w>", "order0".."order2".
inline Codec parse_codec(const std::string& s) {
    if (s == "store") return Codec::store();
    if (s == "rle") return Codec::rle();
    if (s == "lz") return Codec::lz();
    if (s.rfind("lz", 0) == 0) {
        const int w = std::stoi(s.substr(2));
        if (w < 8 || w > 16) throw config_error("lz window must be 2^8 .. 2^16");
        return Codec::lz(static_cast<unsigned>(w));
    }
    if (s == "order0") return Codec::adaptive(0);
    if (s == "order1") return Codec::adaptive(1);
    if (s == "order2" || s == "adaptive") return Codec::adaptive(2);
    throw config_error("unknown codec '" + s + "'");
}

struct CodeResult {
    std::vector<std::uint8_t> bytes;
    std::uint64_t bits;  // header + payload, exact bit count
};

inline constexpr std::uint64_t kHeaderBits = 40;

namespace detail {

class BitWriter {
public:
    void put(std::uint32_t value, unsigned nbits) {
        for (unsigned i = nbits; i-- > 0;) {
            cur_ = static_cast<std::uint8_t>((cur_ << 1) | ((value >> i) & 1u));
            if (++fill_ == 8) {
                out_.push_back(cur_);
                cur_ = 0;
                fill_ = 0;
            }
        }
        bits_ += nbits;
    }
    std::uint64_t bits() const noexcept { return bits_; }
    std::vector<std::uint8_t> finish() {
        if (fill_) out_.push_back(static_cast<std::uint8_t>(cur_ << (8 - fill_)));
        fill_ = 0;
        cur_ = 0;
        return std::move(out_);
    }

private:
    std::vector<std::uint8_t> out_;
    std::uint8_t cur_ = 0;
    unsigned fill_ = 0;
    std::uint64_t bits_ = 0;
};

class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> in) : in_(in) {}
    std::uint32_t get(unsigned nbits) {
        std::uint32_t v = 0;
        for (unsigned i = 0; i < nbits; ++i) {
            if (pos_ / 8 >= in_.size()) throw input_error("truncated code stream");
            const unsigned bit = (in_[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
            v = (v << 1) | bit;
            ++pos_;
        }
        return v;
    }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

/// Adaptive probability of a 1 bit (16-bit fixed point) with a count-driven
/// learning rate 1/(n + 2), n capped at 30.
struct BitCounter {
    std::uint16_t p = 32768;
    std::uint8_t n = 0;

    std::uint32_t p12() const noexcept {
        const std::uint32_t v = p >> 4;
        return v < 1 ? 1 : (v > 4095 ? 4095 : v);
    }
    void update(unsigned bit) noexcept {
        const int target = bit ? 65535 : 0;
        const int cur = p;
        p = static_cast<std::uint16_t>(cur + (target - cur) / (n + 2));
        if (n < 30) ++n;
    }
};

/// Order-k bitwise context model: one 256-node binary tree of counters per
/// distinct k-byte history, allocated on first use.
class ContextModel {
public:
    explicit ContextModel(unsigned order) : order_(order) {}

    void begin_byte(std::uint32_t history) {
        const std::uint32_t key = order_ == 0 ? 0u : (history & ((1u << (8 * order_)) - 1u));
        auto [it, inserted] = slots_.try_emplace(key, static_cast<std::uint32_t>(trees_.size()));
        if (inserted) trees_.emplace_back();
        tree_ = &trees_[it->second];
    }
    BitCounter& node(unsigned idx) { return (*tree_)[idx]; }

private:
    unsigned order_;
    std::unordered_map<std::uint32_t, std::uint32_t> slots_;
    std::vector<std::array<BitCounter, 256>> trees_;
    std::array<BitCounter, 256>* tree_ = nullptr;
};

class ArithmeticEncoder {
public:
    void encode(unsigned bit, std::uint32_t p12) {
        const std::uint32_t xmid = x1_ + ((x2_ - x1_) >> 12) * p12;
        if (bit) x2_ = xmid;
        else x1_ = xmid + 1;
        while (((x1_ ^ x2_) & 0xff000000u) == 0) {
            out_.push_back(static_cast<std::uint8_t>(x2_ >> 24));
            x1_ <<= 8;
            x2_ = (x2_ << 8) | 255u;
        }
    }
    std::vector<std::uint8_t> finish() {
        out_.push_back(static_cast<std::uint8_t>(x1_ >> 24));
        return std::move(out_);
    }

private:
    std::uint32_t x1_ = 0, x2_ = 0xffffffffu;
    std::vector<std::uint8_t> out_;
};

class ArithmeticDecoder {
public:
    explicit ArithmeticDecoder(std::span<const std::uint8_t> in) : in_(in) {
        for (int i = 0; i < 4; ++i) x_ = (x_ << 8) | next();
    }
    unsigned decode(std::uint32_t p12) {
        const std::uint32_t xmid = x1_ + ((x2_ - x1_) >> 12) * p12;
        const unsigned bit = x_ <= xmid;
        if (bit) x2_ = xmid;
        else x1_ = xmid + 1;
        while (((x1_ ^ x2_) & 0xff000000u) == 0) {
            x1_ <<= 8;
            x2_ = (x2_ << 8) | 255u;
            x_ = (x_ << 8) | next();
        }
        return bit;
    }

private:
    std::uint32_t next() { return pos_ < in_.size() ? in_[pos_++] : 0xffu; }
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
    std::uint32_t x1_ = 0, x2_ = 0xffffffffu, x_ = 0;
};

inline CodeResult payload_store(std::span<const std::uint8_t> data) {
    return {std::vector<std::uint8_t>(data.begin(), data.end()), 8 * static_cast<std::uint64_t>(data.size())};
}

inline CodeResult payload_rle(std::span<const std::uint8_t> data) {
    BitWriter w;
    for (std::size_t i = 0; i < data.size();) {
        std::size_t run = 1;
        while (i + run < data.size() && run < 256 && data[i + run] == data[i]) ++run;
        w.put(static_cast<std::uint32_t>(run - 1), 8);
        w.put(data[i], 8);
        i += run;
    }
    const auto bits = w.bits();
    return {w.finish(), bits};
}

inline constexpr std::size_t kLzMinMatch = 3;
inline constexpr std::size_t kLzMaxMatch = kLzMinMatch + 255;
inline constexpr std::size_t kLzMaxCandidates = 256;

inline CodeResult payload_lz(std::span<const std::uint8_t> data, unsigned window_log2) {
    const std::size_t window = std::size_t{1} << window_log2;
    BitWriter w;
    constexpr std::size_t kHashSize = 1u << 16;
    std::vector<std::int64_t> head(kHashSize, -1);
    std::vector<std::int64_t> prev(data.size(), -1);
    auto hash3 = [&](std::size_t i) {
        return ((static_cast<std::uint32_t>(data[i]) << 16) ^ (static_cast<std::uint32_t>(data[i + 1]) << 8) ^
                data[i + 2]) * 2654435761u >> 16;
    };
    auto insert = [&](std::size_t i) {
        if (i + kLzMinMatch > data.size()) return;
        const auto h = hash3(i) & (kHashSize - 1);
        prev[i] = head[h];
        head[h] = static_cast<std::int64_t>(i);
    };
    std::size_t i = 0;
    while (i < data.size()) {
        std::size_t best_len = 0, best_off = 0;
        if (i + kLzMinMatch <= data.size()) {
            std::int64_t cand = head[hash3(i) & (kHashSize - 1)];
            std::size_t tried = 0;
            while (cand >= 0 && tried++ < kLzMaxCandidates) {
                const std::size_t c = static_cast<std::size_t>(cand);
                if (i - c > window) break;
                std::size_t len = 0;
                while (i + len < data.size() && len < kLzMaxMatch && data[c + len] == data[i + len]) ++len;
                if (len > best_len) {
                    best_len = len;
                    best_off = i - c;
                }
                cand = prev[c];
            }
        }
        if (best_len >= kLzMinMatch) {
            w.put(1, 1);
            w.put(static_cast<std::uint32_t>(best_off - 1), window_log2);
            w.put(static_cast<std::uint32_t>(best_len - kLzMinMatch), 8);
            for (std::size_t j = 0; j < best_len; ++j) insert(i + j);
            i += best_len;
        } else {
            w.put(0, 1);
            w.put(data[i], 8);
            insert(i);
            ++i;
        }
    }
    const auto bits = w.bits();
    return {w.finish(), bits};
}

inline CodeResult payload_adaptive(std::span<const std::uint8_t> data, unsigned order) {
    ContextModel model(order);
    ArithmeticEncoder enc;
    std::uint32_t history = 0;
    for (std::uint8_t byte : data) {
        model.begin_byte(history);
        unsigned node = 1;
        for (int b = 7; b >= 0; --b) {
            const unsigned bit = (byte >> b) & 1u;
            auto& c = model.node(node);
            enc.encode(bit, c.p12());
            c.update(bit);
            node = node * 2 + bit;
        }
        history = (history << 8) | byte;
    }
    auto bytes = enc.finish();
    const auto bits = 8 * static_cast<std::uint64_t>(bytes.size());
    return {std::move(bytes), bits};
}

inline std::vector<std::uint8_t> decode_rle(std::span<const std::uint8_t> payload, std::size_t n) {
    std::vector<std::uint8_t> out;
    out.reserve(n);
    BitReader r(payload);
    while (out.size() < n) {
        const std::size_t run = r.get(8) + 1;
        const auto byte = static_cast<std::uint8_t>(r.get(8));
        if (out.size() + run > n) throw input_error("rle run overflows declared length");
        out.insert(out.end(), run, byte);
    }
    return out;
}

inline std::vector<std::uint8_t> decode_lz(std::span<const std::uint8_t> payload, std::size_t n, unsigned window_log2) {
    std::vector<std::uint8_t> out;
    out.reserve(n);
    BitReader r(payload);
    while (out.size() < n) {
        if (r.get(1)) {
            const std::size_t off = r.get(window_log2) + 1;
            const std::size_t len = r.get(8) + kLzMinMatch;
            if (off > out.size() || out.size() + len > n) throw input_error("corrupt lz stream");
            const std::size_t start = out.size() - off;
            for (std::size_t j = 0; j < len; ++j) out.push_back(out[start + j]);
        } else {
            out.push_back(static_cast<std::uint8_t>(r.get(8)));
        }
    }
    return out;
}

inline std::vector<std::uint8_t> decode_adaptive(std::span<const std::uint8_t> payload, std::size_t n, unsigned order) {
    ContextModel model(order);
    ArithmeticDecoder dec(payload);
    std::vector<std::uint8_t> out;
    out.reserve(n);
    std::uint32_t history = 0;
    for (std::size_t i = 0; i < n; ++i) {
        model.begin_byte(history);
        unsigned node = 1;
        for (int b = 0; b < 8; ++b) {
            auto& c = model.node(node);
            const unsigned bit = dec.decode(c.p12());
            c.update(bit);
            node = node * 2 + bit;
        }
        const auto byte = static_cast<std::uint8_t>(node & 0xff);
        out.push_back(byte);
        history = (history << 8) | byte;
    }
    return out;
}

}  // namespace detail

/// Compresses nonempty data; `bits` is the exact code length C(x) including
/// the 40-bit header.
inline CodeResult compress(const Codec& codec, std::span<const std::uint8_t> data) {
    if (data.empty()) throw input_error("cannot compress empty data");
    if (data.size() > 0xffffffffu) throw input_error("input too large for 32-bit length field");
    CodeResult payload{};
    switch (codec.kind) {
        case CodecKind::store: payload = detail::payload_store(data); break;
        case CodecKind::rle: payload = detail::payload_rle(data); break;
        case CodecKind::lz_window: payload = detail::payload_lz(data, codec.window_log2); break;
        case CodecKind::adaptive: payload = detail::payload_adaptive(data, codec.order); break;
    }
    CodeResult out;
    const auto n = static_cast<std::uint32_t>(data.size());
    const std::array<std::uint8_t, 5> header{codec.id(), static_cast<std::uint8_t>(n >> 24),
                                             static_cast<std::uint8_t>(n >> 16), static_cast<std::uint8_t>(n >> 8),
                                             static_cast<std::uint8_t>(n)};
    out.bytes.resize(header.size() + payload.bytes.size());
    std::copy(header.begin(), header.end(), out.bytes.begin());
    std::copy(payload.bytes.begin(), payload.bytes.end(), out.bytes.begin() + header.size());
    out.bits = kHeaderBits + payload.bits;
    return out;
}

inline std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> code) {
    if (code.size() < 5) throw input_error("code stream shorter than its header");
    const Codec codec = Codec::from_id(code[0]);
    const std::size_t n = (std::size_t{code[1]} << 24) | (std::size_t{code[2]} << 16) | (std::size_t{code[3]} << 8) |
                          std::size_t{code[4]};
    const auto payload = code.subspan(5);
    switch (codec.kind) {
        case CodecKind::store:
            if (payload.size() != n) throw input_error("stored payload length mismatch");
            return {payload.begin(), payload.end()};
        case CodecKind::rle: return detail::decode_rle(payload, n);
        case CodecKind::lz_window: return detail::decode_lz(payload, n, codec.window_log2);
        case CodecKind::adaptive: return detail::decode_adaptive(payload, n, codec.order);
    }
    throw input_error("unknown codec");
}

struct DeficiencyScore {
    double neg_log_p_bits;
    std::uint64_t code_bits;
    double deficiency_bits;  // neg_log_p_bits - code_bits; +inf when P(x) = 0
};

inline std::vector<Symbol> bytes_to_symbols(std::span<const std::uint8_t> data) {
    return {data.begin(), data.end()};
}

/// -log2 P(x) - C(x) for a model over the 256-symbol byte alphabet.
inline DeficiencyScore compression_deficiency(const Model& p, std::span<const std::uint8_t> data, const Codec& codec) {
    if (p.alphabet().size() != 256) throw input_error("compression deficiency needs a model over the byte alphabet");
    const Sequence x(p.alphabet(), bytes_to_symbols(data));
    const double nlp = -log_prob(p, x) / kLn2;
    const auto code = compress(codec, data);
    const double def = std::isinf(nlp) ? kInf : nlp - static_cast<double>(code.bits);
    return {nlp, code.bits, def};
}

}  // namespace realism
