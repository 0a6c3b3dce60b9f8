#pragma once

// Closed-form capacity bounds for one block, in bits per symbol:
//
//   lower_bound_markov   mutual information rate of the stationary Markov
//                        input, assembled from the analytical formula; it is
//                        required to agree with the enumeration oracle
//                        mutual_information_exact(...)/l to ~1e-12.
//   lower_bound_uniform  its alpha = 1/2 specialization, valid for block
//                        lengths far beyond the enumeration range.
//   upper_bound_u        the entropy-maximization upper bound, clamped to 1
//                        (one bit per symbol is always an upper bound for a
//                        binary-input block; the raw expression exceeds it
//                        for duplication-heavy parameters).
//   lower_bound_no_si    Markov lower bound minus H_b(p,q)/l, the correction
//                        that removes the per-block side information. May be
//                        negative; the raw value is returned.
//
// The closed form has log(alpha), log(1-alpha) and 1/(1-alpha) factors, so
// alpha is clamped to [1e-3, 1-1e-3]; outside that interval the enumeration
// oracle is used instead and the report is flagged.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "segcap/channel.hpp"
#include "segcap/combinatorics.hpp"

namespace segcap {

inline constexpr double kAlphaClampLo = 1e-3;
inline constexpr double kAlphaClampHi = 1.0 - 1e-3;

inline double entropy_hb(double p, double q) {
    if (!(p >= 0.0) || !(q >= 0.0) || p + q > 1.0 + 1e-9)
        throw std::domain_error("entropy_hb: (p,q) outside the probability simplex");
    return -xlog2x(p) - xlog2x(q) - xlog2x(1.0 - p - q);
}

namespace detail {

inline double hb2(double a) { return -xlog2x(a) - xlog2x(1.0 - a); }

// log2(2^{l+1} - 2), stable for any l >= 1
inline double log2_long_outputs(int l) {
    return l + 1 + std::log1p(-std::exp2(static_cast<double>(-l))) / std::log(2.0);
}

// Weight C(n,k) a^i (1-a)^j as a double; exact-table binomials when possible.
inline double binom_weight(int n, int k, double a, int i, double oma, int j) {
    if (n <= 63)
        return static_cast<double>(binomial_exact(n, k)) * std::pow(a, i) * std::pow(oma, j);
    return std::exp2(log2_binomial(n, k) + i * std::log2(a) + j * std::log2(oma));
}

// Markov-input mutual information rate, assembled term by term. Valid for
// alpha in the clamped interval; callers guarantee l > 1.
inline double l_si_markov_closed(int l, double p, double q, double a) {
    const double oma = 1.0 - a;
    const double g = (1.0 - 2.0 * a) / (a * a);
    const double b = (l - 1 + (a * a - a) * (2.0 * l - 4.0)) / (a * a);
    const double ld = static_cast<double>(l);

    const double t1 =
        (1.0 + (1.0 - p) * (l - 1) * hb2(a) + (p + q) * std::pow(oma, l - 1) * std::log2(ld)) / ld;

    const double pa = 2.0 * a * a * a * (l - 2) - (ld * ld + ld - 6.0) * a * a +
                      (ld * ld - 3.0 * ld - 2.0) * a + 2.0 * ld;
    const double pb = -2.0 * a * a * a * (l - 2) + a * a * (ld * ld + ld - 6.0) -
                      2.0 * a * (ld * ld - 2.0 * ld - 1.0) + ld * (ld - 3.0);
    const double t2 = -p / (ld * ld * oma) * (pa * std::log2(a) + pb * std::log2(oma));

    // deletion-side output entropy: v = beta + gamma (m+1) is a scaled output
    // probability, nonnegative up to roundoff, so v log v gets the 0 log 0 guard
    double s3 = 0.0;
    for (int m = 0; m <= l - 2; ++m) {
        const double v = b + g + g * m;
        s3 += binom_weight(l - 2, m, a, m + 2, oma, l - 3 - m) * xlog2x(v);
    }
    const double t3 = -p / (ld * ld) * s3;

    double s4 = 0.0;
    for (int m = 1; m <= l; ++m)
        s4 += binom_weight(l, m, a, l - m, oma, m) * m * std::log2(static_cast<double>(m));
    const double t4 = -q / (ld * ld * oma) * s4;

    double s5 = 0.0;
    for (int m = 2; m <= l; ++m) {
        double inner = 0.0;
        for (int k = 1; k <= l - m + 1; ++k)
            inner += binomial_real(l - k - 1, m - 2) * k * std::log2(static_cast<double>(k));
        s5 += m * std::pow(a, m - 1) * std::pow(oma, l - m) * inner;
    }
    const double t5 = (p + q) / (ld * ld) * s5;

    return t1 + t2 + t3 + t4 + t5;
}

}  // namespace detail

inline double lower_bound_markov(const ChannelParams& params, double alpha,
                                 bool* enumeration_fallback = nullptr,
                                 int enumeration_cap = kDefaultEnumerationCap) {
    if (params.ell < 2) throw std::domain_error("lower_bound_markov: needs l > 1");
    if (!(alpha >= 0.0) || !(alpha <= 1.0))
        throw std::domain_error("lower_bound_markov: alpha outside [0,1]");
    if (enumeration_fallback) *enumeration_fallback = false;
    if (alpha < kAlphaClampLo || alpha > kAlphaClampHi) {
        if (enumeration_fallback) *enumeration_fallback = true;
        const auto input = markov_input_distribution(params.ell, {alpha});
        return mutual_information_exact(params, input, enumeration_cap) / params.ell;
    }
    return detail::l_si_markov_closed(params.ell, params.p, params.q, alpha);
}

inline double lower_bound_uniform(const ChannelParams& params) {
    if (params.ell < 2) throw std::domain_error("lower_bound_uniform: needs l > 1");
    const int l = params.ell;
    const double ld = static_cast<double>(l), p = params.p, q = params.q;
    // (q / (l^2 2^{l-1})) sum_m m C(l,m) log2 m  ==  (2q/l^2) E[m log2 m], m ~ Bin(l, 1/2)
    const double m_term = 2.0 * q / (ld * ld) * binomial_mean_klog2k(l, 0.5);
    double sj = 0.0;
    for (int j = 2; j <= l - 1; ++j)
        sj += (ld - j + 3.0) * std::exp2(static_cast<double>(-j - 1)) * j *
              std::log2(static_cast<double>(j));
    return 1.0 - p / ld - m_term -
           (p - (p + q) * std::exp2(1.0 - ld)) * std::log2(ld) / ld +
           (p + q) / (ld * ld) * sj;
}

namespace detail {

// log2 sum_x 2^{-c Hhat(x)} over all 2^l words. Direct enumeration under the
// cap; above it, group words by run-length composition with a convolution
// over run lengths: with g_k = k^{c k / l} (the per-run weight after
// rewriting 2^{-c Hhat} via Hhat = log2 l - (1/l) sum r_i log2 r_i at fixed
// total length), T_n = sum over compositions of n of prod g_k, computed by
// the O(l^2) recurrence T_n = g_n + sum_k g_k T_{n-k}. Everything is scaled
// by 2^{-n} to keep the recurrence in range.
inline double log2_weight_sum(int l, double c, int enumeration_cap = kDefaultEnumerationCap) {
    if (l <= enumeration_cap && l <= 24) {
        double z = 0.0;
        const std::uint64_t n = std::uint64_t{1} << l;
        for (std::uint64_t x = 0; x < n; ++x)
            z += std::exp2(-c * empirical_runlength_entropy(PackedWord{x, l}));
        return std::log2(z);
    }
    std::vector<double> gt(l + 1), tt(l + 1);
    for (int k = 1; k <= l; ++k)
        gt[k] = std::exp2(c * k / static_cast<double>(l) * std::log2(static_cast<double>(k)) - k);
    for (int n = 1; n <= l; ++n) {
        double acc = gt[n];
        for (int k = 1; k < n; ++k) acc += gt[k] * tt[n - k];
        tt[n] = acc;
    }
    return 1.0 + l + std::log2(tt[l]) - c * std::log2(static_cast<double>(l));
}

}  // namespace detail

inline double upper_bound_u(const ChannelParams& params,
                            int enumeration_cap = kDefaultEnumerationCap) {
    if (params.ell < 2) throw std::domain_error("upper_bound_u: needs l > 1");
    const int l = params.ell;
    const double p = params.p, q = params.q;
    double raw;
    if (p + q >= 1.0 - 1e-12) {
        // identity outputs vanish; the weighted-sum term tends to 0
        raw = (p * (l - 1) + q * detail::log2_long_outputs(l)) / l;
    } else {
        const double c = (p + q) / (1.0 - p - q);
        raw = (p * (l - 1) + q * detail::log2_long_outputs(l) +
               (1.0 - p - q) * detail::log2_weight_sum(l, c, enumeration_cap)) /
              l;
    }
    return raw < 1.0 ? raw : 1.0;
}

inline double lower_bound_no_si(const ChannelParams& params, double alpha,
                                bool* enumeration_fallback = nullptr,
                                int enumeration_cap = kDefaultEnumerationCap) {
    return lower_bound_markov(params, alpha, enumeration_fallback, enumeration_cap) -
           entropy_hb(params.p, params.q) / params.ell;
}

struct AlphaOptimum {
    double alpha;
    double value;
};

// Coarse 65-point grid over the clamped interval (it contains 0.5), then
// golden-section refinement of the bracketing cell.
inline AlphaOptimum optimize_alpha(const ChannelParams& params, double tol = 1e-7) {
    if (params.ell < 2) throw std::domain_error("optimize_alpha: needs l > 1");
    if (!(tol > 0.0)) throw std::domain_error("optimize_alpha: tol must be positive");
    const auto f = [&](double a) { return detail::l_si_markov_closed(params.ell, params.p, params.q, a); };
    constexpr int kGrid = 65;
    double best_a = 0.5, best_v = -1.0;
    int best_i = 0;
    std::vector<double> xs(kGrid);
    for (int i = 0; i < kGrid; ++i) {
        xs[i] = kAlphaClampLo + (kAlphaClampHi - kAlphaClampLo) * i / (kGrid - 1);
        const double v = f(xs[i]);
        if (v > best_v) {
            best_v = v;
            best_a = xs[i];
            best_i = i;
        }
    }
    double lo = xs[best_i > 0 ? best_i - 1 : 0];
    double hi = xs[best_i < kGrid - 1 ? best_i + 1 : kGrid - 1];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        }
    }
    if (f1 > best_v) {
        best_v = f1;
        best_a = x1;
    }
    if (f2 > best_v) {
        best_v = f2;
        best_a = x2;
    }
    return {best_a, best_v};
}

struct BoundsReport {
    ChannelParams params;
    double alpha;
    double l_si_alpha;
    double l_si_uniform;
    double upper_u;
    double l_no_si;
    double hb_pq;
    bool enumeration_fallback;
};

inline BoundsReport evaluate_bounds(const ChannelParams& params, double alpha,
                                    int enumeration_cap = kDefaultEnumerationCap) {
    bool fb = false;
    const double lsi = lower_bound_markov(params, alpha, &fb, enumeration_cap);
    const double hb = entropy_hb(params.p, params.q);
    return {params,
            alpha,
            lsi,
            lower_bound_uniform(params),
            upper_bound_u(params, enumeration_cap),
            lsi - hb / params.ell,
            hb,
            fb};
}

}  // namespace segcap
