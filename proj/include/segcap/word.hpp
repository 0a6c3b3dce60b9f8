#pragma once

// Binary words and their run-length description. Words carry an explicit
// length, so leading zeros are significant. Enumeration-heavy code uses the
// packed form (bits in the low positions of a 64-bit integer, length kept
// separately), which is valid up to 63 bits.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace segcap {

struct BinaryWord {
    std::vector<std::uint8_t> bits;  // each entry is 0 or 1

    BinaryWord() = default;
    explicit BinaryWord(std::vector<std::uint8_t> b) : bits(std::move(b)) {}

    std::size_t size() const { return bits.size(); }
    bool empty() const { return bits.empty(); }
    bool operator==(const BinaryWord&) const = default;
};

inline BinaryWord word_from_string(const std::string& s) {
    BinaryWord w;
    w.bits.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') throw std::invalid_argument("word_from_string: symbol not 0/1");
        w.bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return w;
}

inline std::string to_string(const BinaryWord& w) {
    std::string s;
    s.reserve(w.size());
    for (auto b : w.bits) s.push_back(static_cast<char>('0' + b));
    return s;
}

struct RunLengths {
    int first_bit = 0;           // value of the first run
    std::vector<int> runs;       // positive run lengths, adjacent runs alternate value

    std::size_t run_count() const { return runs.size(); }
    bool operator==(const RunLengths&) const = default;
};

inline RunLengths runlength_encode(const BinaryWord& w) {
    if (w.empty()) throw std::domain_error("runlength_encode: empty word");
    RunLengths rl;
    rl.first_bit = w.bits[0];
    rl.runs.push_back(1);
    for (std::size_t i = 1; i < w.size(); ++i) {
        if (w.bits[i] == w.bits[i - 1])
            ++rl.runs.back();
        else
            rl.runs.push_back(1);
    }
    return rl;
}

inline BinaryWord runlength_decode(const RunLengths& rl) {
    if (rl.first_bit != 0 && rl.first_bit != 1)
        throw std::domain_error("runlength_decode: first bit not 0/1");
    BinaryWord w;
    std::uint8_t bit = static_cast<std::uint8_t>(rl.first_bit);
    for (int r : rl.runs) {
        if (r <= 0) throw std::domain_error("runlength_decode: run length must be positive");
        w.bits.insert(w.bits.end(), static_cast<std::size_t>(r), bit);
        bit ^= 1u;
    }
    return w;
}

// -(sum over runs) (r_i/l) log2(r_i/l); 0 for a constant word, log2(l) for an
// alternating one.
inline double empirical_runlength_entropy(const BinaryWord& w) {
    if (w.empty()) throw std::domain_error("empirical_runlength_entropy: empty word");
    const double l = static_cast<double>(w.size());
    double h = 0.0;
    std::size_t i = 0;
    while (i < w.size()) {
        std::size_t j = i;
        while (j < w.size() && w.bits[j] == w.bits[i]) ++j;
        const double f = static_cast<double>(j - i) / l;
        h -= f * std::log2(f);
        i = j;
    }
    return h;
}

// Packed representation: bit i of `bits` is symbol i of the word.
struct PackedWord {
    std::uint64_t bits = 0;
    int len = 0;

    bool operator==(const PackedWord&) const = default;
};

inline PackedWord pack(const BinaryWord& w) {
    if (w.size() > 63) throw std::domain_error("pack: packed words are limited to 63 bits");
    PackedWord pw;
    pw.len = static_cast<int>(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        pw.bits |= static_cast<std::uint64_t>(w.bits[i] & 1u) << i;
    return pw;
}

inline BinaryWord unpack(const PackedWord& pw) {
    BinaryWord w;
    w.bits.resize(static_cast<std::size_t>(pw.len));
    for (int i = 0; i < pw.len; ++i) w.bits[static_cast<std::size_t>(i)] = (pw.bits >> i) & 1u;
    return w;
}

// Run lengths of a packed word, in order of appearance.
inline void runs_of(const PackedWord& pw, std::vector<int>& out) {
    out.clear();
    if (pw.len == 0) return;
    int cur = 1;
    for (int i = 1; i < pw.len; ++i) {
        if (((pw.bits >> i) & 1u) == ((pw.bits >> (i - 1)) & 1u)) {
            ++cur;
        } else {
            out.push_back(cur);
            cur = 1;
        }
    }
    out.push_back(cur);
}

inline std::vector<int> runs_of(const PackedWord& pw) {
    std::vector<int> out;
    runs_of(pw, out);
    return out;
}

inline int run_count(const PackedWord& pw) {
    if (pw.len == 0) return 0;
    // transitions = popcount of x XOR (x >> 1) over the low len-1 bits
    const std::uint64_t t = (pw.bits ^ (pw.bits >> 1)) & ((pw.len >= 2) ? ((std::uint64_t{1} << (pw.len - 1)) - 1) : 0);
    return 1 + __builtin_popcountll(t);
}

inline double empirical_runlength_entropy(const PackedWord& pw) {
    if (pw.len == 0) throw std::domain_error("empirical_runlength_entropy: empty word");
    const double l = static_cast<double>(pw.len);
    double h = 0.0;
    int i = 0;
    while (i < pw.len) {
        int j = i;
        const std::uint64_t b = (pw.bits >> i) & 1u;
        while (j < pw.len && ((pw.bits >> j) & 1u) == b) ++j;
        const double f = static_cast<double>(j - i) / l;
        h -= f * std::log2(f);
        i = j;
    }
    return h;
}

}  // namespace segcap
