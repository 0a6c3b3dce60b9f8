#pragma once

// Exact model of one block of the one-bit deletion/duplication channel.
//
// A length-l input block is passed unchanged with probability 1-p-q, loses
// one uniformly chosen bit with probability p, or has one uniformly chosen
// bit repeated with probability q. All positions inside one run produce the
// same output word, so a row of the law has at most 2 n_r + 1 entries:
// the identity output with mass 1-p-q, run i shortened with mass p r_i / l,
// run i lengthened with mass q r_i / l. Outputs of different lengths are
// distinct symbols: the output length itself tells the receiver which of the
// three events happened.

#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "segcap/distribution.hpp"
#include "segcap/word.hpp"

namespace segcap {

inline constexpr int kDefaultEnumerationCap = 16;

struct ChannelParams {
    int ell;
    double p;
    double q;

    ChannelParams(int ell_, double p_, double q_) : ell(ell_), p(p_), q(q_) {
        if (ell < 1) throw std::domain_error("ChannelParams: block length must be >= 1");
        if (!(p >= 0.0) || !(q >= 0.0) || p + q > 1.0 + 1e-9)
            throw std::domain_error("ChannelParams: need p >= 0, q >= 0, p + q <= 1");
    }

    // Unconditional per-bit probabilities of deletion and duplication.
    double p_d() const { return p / ell; }
    double p_i() const { return q / ell; }
};

namespace detail {

inline std::uint64_t low_mask(int n) { return (std::uint64_t{1} << n) - 1; }

inline std::uint64_t word_key(const PackedWord& w) {
    return (static_cast<std::uint64_t>(w.len) << 32) | w.bits;
}

}  // namespace detail

// One row of the transition law; coinciding outputs are merged.
inline std::vector<std::pair<PackedWord, double>> transition_row(const PackedWord& x,
                                                                 const ChannelParams& params) {
    if (x.len != params.ell) throw std::domain_error("transition_row: word length != ell");
    if (x.len > 62) throw std::length_error("transition_row: packed outputs need l <= 62");
    const int l = params.ell;
    std::vector<std::pair<PackedWord, double>> row;
    row.reserve(2 * static_cast<std::size_t>(l) + 1);
    auto add = [&row](PackedWord y, double m) {
        if (m <= 0.0) return;
        for (auto& e : row) {
            if (e.first == y) {
                e.second += m;
                return;
            }
        }
        row.emplace_back(y, m);
    };
    add(x, 1.0 - params.p - params.q);
    int pos = 0;
    while (pos < l) {
        const std::uint64_t bit = (x.bits >> pos) & 1u;
        int end = pos;
        while (end < l && ((x.bits >> end) & 1u) == bit) ++end;
        const double r = static_cast<double>(end - pos);
        const std::uint64_t low = x.bits & detail::low_mask(pos);
        // delete one bit of this run
        add({low | ((x.bits >> (pos + 1)) << pos), l - 1}, params.p * r / l);
        // duplicate one bit of this run
        add({low | (bit << pos) | ((x.bits >> pos) << (pos + 1)), l + 1}, params.q * r / l);
        pos = end;
    }
    return row;
}

inline std::vector<std::pair<BinaryWord, double>> transition_row(const BinaryWord& x,
                                                                 const ChannelParams& params) {
    auto packed = transition_row(pack(x), params);
    std::vector<std::pair<BinaryWord, double>> row;
    row.reserve(packed.size());
    for (auto& [w, m] : packed) row.emplace_back(unpack(w), m);
    return row;
}

struct LawEntry {
    std::uint32_t out;
    double prob;
};

// Law over all 2^l inputs in bit order, CSR layout. Output ids are assigned
// in first-touch order, so the structure is deterministic.
struct SparseTransitionLaw {
    ChannelParams params;
    std::vector<PackedWord> outputs;
    std::vector<std::size_t> row_begin;  // size 2^l + 1
    std::vector<LawEntry> entries;

    std::size_t num_inputs() const { return row_begin.size() - 1; }
    std::size_t num_outputs() const { return outputs.size(); }
};

inline SparseTransitionLaw transition_law(const ChannelParams& params,
                                          int enumeration_cap = kDefaultEnumerationCap) {
    if (params.ell > enumeration_cap)
        throw std::length_error("transition_law: block length exceeds the enumeration cap");
    const int l = params.ell;
    const std::uint64_t n = std::uint64_t{1} << l;
    SparseTransitionLaw law{params, {}, {}, {}};
    law.row_begin.reserve(n + 1);
    law.row_begin.push_back(0);
    law.entries.reserve(n * (2 * static_cast<std::size_t>(l) / 3 + 3));
    std::unordered_map<std::uint64_t, std::uint32_t> ids;
    ids.reserve(4 * n);
    for (std::uint64_t x = 0; x < n; ++x) {
        for (auto& [y, m] : transition_row(PackedWord{x, l}, params)) {
            auto [it, fresh] = ids.try_emplace(detail::word_key(y),
                                               static_cast<std::uint32_t>(law.outputs.size()));
            if (fresh) law.outputs.push_back(y);
            law.entries.push_back({it->second, m});
        }
        law.row_begin.push_back(law.entries.size());
    }
    return law;
}

// Stationary symmetric Markov input: P(X_1) = 1/2, Pr(X_i != X_{i-1}) = alpha,
// i.e. P(x) = 0.5 alpha^{n_r - 1} (1 - alpha)^{l - n_r}.
struct MarkovInputParams {
    double alpha;
};

namespace detail {
inline void check_enumeration_width(int l) {
    if (l < 1) throw std::domain_error("block length must be >= 1");
    if (l > 24) throw std::length_error("enumerated distributions are limited to l <= 24");
}
}  // namespace detail

inline Distribution markov_input_distribution(int l, const MarkovInputParams& mp) {
    detail::check_enumeration_width(l);
    if (!(mp.alpha >= 0.0) || !(mp.alpha <= 1.0))
        throw std::domain_error("markov_input_distribution: alpha outside [0,1]");
    const std::uint64_t n = std::uint64_t{1} << l;
    Distribution d;
    d.support.reserve(n);
    d.mass.reserve(n);
    for (std::uint64_t x = 0; x < n; ++x) {
        const PackedWord w{x, l};
        const int m = run_count(w);
        d.support.push_back(w);
        d.mass.push_back(0.5 * std::pow(mp.alpha, m - 1) * std::pow(1.0 - mp.alpha, l - m));
    }
    return d;
}

inline Distribution uniform_input_distribution(int l) {
    detail::check_enumeration_width(l);
    const std::uint64_t n = std::uint64_t{1} << l;
    Distribution d;
    d.support.reserve(n);
    d.mass.assign(n, 1.0 / static_cast<double>(n));
    for (std::uint64_t x = 0; x < n; ++x) d.support.push_back({x, l});
    return d;
}

// P_Y(y) = sum_x P_X(x) Q(y|x). Output support in first-touch order.
inline Distribution output_distribution(const ChannelParams& params, const Distribution& input) {
    validate_distribution(input);
    Distribution out;
    std::unordered_map<std::uint64_t, std::size_t> ids;
    ids.reserve(4 * input.size());
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (input.support[i].len != params.ell)
            throw std::domain_error("output_distribution: input word length != ell");
        if (input.mass[i] == 0.0) continue;
        for (auto& [y, m] : transition_row(input.support[i], params)) {
            auto [it, fresh] = ids.try_emplace(detail::word_key(y), out.support.size());
            if (fresh) {
                out.support.push_back(y);
                out.mass.push_back(0.0);
            }
            out.mass[it->second] += input.mass[i] * m;
        }
    }
    return out;
}

// I(X;Y) = H(Y) - H(Y|X) in bits, by exact summation over the sparse rows.
// Unnormalized; divide by l for bits per symbol.
inline double mutual_information_exact(const ChannelParams& params, const Distribution& input,
                                       int enumeration_cap = kDefaultEnumerationCap) {
    if (params.ell > enumeration_cap)
        throw std::length_error("mutual_information_exact: block length exceeds the enumeration cap");
    validate_distribution(input);
    std::unordered_map<std::uint64_t, double> py;
    py.reserve(4 * input.size());
    double h_y_given_x = 0.0;
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (input.support[i].len != params.ell)
            throw std::domain_error("mutual_information_exact: input word length != ell");
        const double px = input.mass[i];
        if (px == 0.0) continue;
        double hrow = 0.0;
        for (auto& [y, m] : transition_row(input.support[i], params)) {
            py[detail::word_key(y)] += px * m;
            hrow -= xlog2x(m);
        }
        h_y_given_x += px * hrow;
    }
    double h_y = 0.0;
    for (auto& [key, m] : py) h_y -= xlog2x(m);
    return h_y - h_y_given_x;
}

}  // namespace segcap
