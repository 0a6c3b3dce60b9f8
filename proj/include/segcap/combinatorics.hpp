#pragma once

// Exact run-count combinatorics and binomial utilities. Binomials are exact
// 64-bit integers for n <= 63; anything larger goes through lgamma-based
// logarithms (requesting an exact integer beyond 63 is a reported error,
// never a silent wraparound).

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace segcap {

namespace detail {

struct BinomialTable {
    // Pascal's triangle for n <= 63; every entry fits in uint64_t.
    std::uint64_t c[64][64] = {};
    BinomialTable() {
        for (int n = 0; n < 64; ++n) {
            c[n][0] = 1;
            for (int k = 1; k <= n; ++k)
                c[n][k] = c[n - 1][k - 1] + (k <= n - 1 ? c[n - 1][k] : 0);
        }
    }
};

inline const BinomialTable& binomial_table() {
    static const BinomialTable t;
    return t;
}

}  // namespace detail

inline std::uint64_t binomial_exact(int n, int k) {
    if (n < 0 || k < 0 || k > n) return 0;
    if (n > 63) throw std::overflow_error("binomial_exact: exact integers are limited to n <= 63");
    return detail::binomial_table().c[n][k];
}

// log2 C(n,k) for arbitrary n; -inf when the coefficient is zero.
inline double log2_binomial(int n, int k) {
    if (n < 0 || k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    static const double inv_ln2 = 1.0 / std::log(2.0);
    return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) * inv_ln2;
}

inline double binomial_real(int n, int k) {
    if (n < 0 || k < 0 || k > n) return 0.0;
    if (n <= 63) return static_cast<double>(binomial_exact(n, k));
    return std::exp2(log2_binomial(n, k));
}

// Number of length-l binary words with exactly m runs: 2 C(l-1, m-1).
inline std::uint64_t count_words_with_m_runs(int l, int m) {
    if (l < 1 || m < 1 || m > l) return 0;
    return 2 * binomial_exact(l - 1, m - 1);
}

// Number of length-k runs summed over all length-l words with m runs:
//   2           if m = 1 and k = l,
//   2m C(l-k-1, m-2)  if m >= 2 and k <= l-m+1,
//   0           otherwise.
inline std::uint64_t count_runs_of_length(int k, int m, int l) {
    if (k < 1 || m < 1 || l < 1) return 0;
    if (m == 1) return k == l ? 2 : 0;
    if (k > l - m + 1) return 0;
    return 2 * static_cast<std::uint64_t>(m) * binomial_exact(l - k - 1, m - 2);
}

// Number of length-j runs over all 2^l words: 2^{l-j-1} (l-j+3) for j < l,
// and 2 for j = l.
inline std::uint64_t total_run_count(int l, int j) {
    if (l < 1 || j < 1 || j > l) return 0;
    if (j == l) return 2;
    const unsigned __int128 v = (static_cast<unsigned __int128>(1) << (l - j - 1)) *
                                static_cast<unsigned>(l - j + 3);
    if (v > static_cast<unsigned __int128>(~std::uint64_t{0}))
        throw std::overflow_error("total_run_count: value exceeds 64 bits");
    return static_cast<std::uint64_t>(v);
}

// x log2 x with the 0 log 0 = 0 convention.
inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

// E[ k log2 k ] under Binomial(n, s), computed exactly. Uses the integer
// table for n <= 63 and log-space probabilities beyond, so it stays accurate
// out to n in the thousands.
inline double binomial_mean_klog2k(int n, double s) {
    if (n < 1 || s < 0.0 || s > 1.0) throw std::domain_error("binomial_mean_klog2k: bad arguments");
    const double t = 1.0 - s;
    if (s == 0.0) return 0.0;
    if (t == 0.0) return n * std::log2(static_cast<double>(n));
    double acc = 0.0;
    if (n <= 63) {
        for (int k = 2; k <= n; ++k)
            acc += static_cast<double>(binomial_exact(n, k)) * std::pow(s, k) * std::pow(t, n - k) *
                   k * std::log2(static_cast<double>(k));
    } else {
        const double ls = std::log(s), lt = std::log(t), lg_n1 = std::lgamma(n + 1.0);
        for (int k = 2; k <= n; ++k) {
            const double lp = lg_n1 - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                              k * ls + (n - k) * lt;
            acc += std::exp(lp) * k * std::log2(static_cast<double>(k));
        }
    }
    return acc;
}

}  // namespace segcap
