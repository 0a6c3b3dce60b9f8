#pragma once

// Large-block expansions and their constants, all in base 2. The sources mix
// natural-log-flavored constants into base-2 formulas; base 2 throughout is
// the only reading consistent with the quoted decimal for K1, and it is the
// one validated against the exact oracles by the residual slope tests.

#include <cmath>
#include <stdexcept>

#include "segcap/channel.hpp"
#include "segcap/combinatorics.hpp"

namespace segcap {

// Tail bound for K: sum_{j>J} j log2(j) / 2^{j+1} <= sum_{j>J} j^2/2^{j+1}
//                 = 2^{-J-1} (J^2 + 4J + 6).
inline double k_tail_bound(int j) {
    return std::exp2(static_cast<double>(-j - 1)) * (static_cast<double>(j) * j + 4.0 * j + 6.0);
}

// K = sum_{j>=1} j log2(j) / 2^{j+1}, summed small terms first once the
// certified tail is below tol.
inline double constant_k(double tol = 1e-12) {
    if (!(tol > 0.0)) throw std::domain_error("constant_k: tol must be positive");
    int cutoff = 2;
    while (k_tail_bound(cutoff) > tol) ++cutoff;
    double k = 0.0;
    for (int j = cutoff; j >= 2; --j)
        k += j * std::log2(static_cast<double>(j)) * std::exp2(static_cast<double>(-j - 1));
    return k;
}

struct AsymptoticConstants {
    double k;   // sum j log2 j / 2^{j+1}
    double k1;  // log2(2e) - k
    double k2;  // k - log2(e/2) == 2 - k1, used in that form so k1 + k2 == 2 exactly
};

inline const AsymptoticConstants& asymptotic_constants() {
    static const AsymptoticConstants c = [] {
        const double k = constant_k(1e-12);
        const double k1 = 1.0 + std::log2(std::exp(1.0)) - k;
        return AsymptoticConstants{k, k1, 2.0 - k1};
    }();
    return c;
}

struct BernoulliKlogK {
    double exact;
    double asymptotic;
};

// Binomial averaging of k log2 k under Bin(n, s), and its large-n form
//   s n log2(s n) + (t + (s-1)/2) log2 e,   t = 1 - s.
// The gap is O(1/n); the s = 1 case degenerates to n log2 n exactly.
inline BernoulliKlogK bernoulli_klogk(int n, double s) {
    if (n < 1 || !(s > 0.0) || !(s <= 1.0))
        throw std::domain_error("bernoulli_klogk: need n >= 1 and s in (0,1]");
    const double t = 1.0 - s;
    const double sn = s * n;
    const double asym = sn * std::log2(sn) + (t + (s - 1.0) / 2.0) * std::log2(std::exp(1.0));
    return {binomial_mean_klog2k(n, s), asym};
}

namespace detail {

inline double expansion_polynomial(const ChannelParams& params) {
    if (params.ell < 2) throw std::domain_error("expansion: needs l > 1");
    const double l = static_cast<double>(params.ell);
    const double k = asymptotic_constants().k;
    return 1.0 - (params.p + params.q) / l * std::log2(l) + params.p / l * (k - 1.0) +
           params.q / l * (k + 1.0);
}

}  // namespace detail

// The three per-block expansions share one polynomial; they differ only in
// which exact quantity they approximate and in the order of the residual.
inline double expansion_l_uniform(const ChannelParams& params) {
    return detail::expansion_polynomial(params);
}
inline double expansion_u(const ChannelParams& params) {
    return detail::expansion_polynomial(params);
}
inline double expansion_csi(const ChannelParams& params) {
    return detail::expansion_polynomial(params);
}

enum class SegmentedRegime { general, del_small, dup_small };

// No-side-information capacity expansions per symbol. The two refined
// regimes are single-error-type laws in the per-bit rates p/l and q/l.
inline double expansion_segmented(const ChannelParams& params, SegmentedRegime regime) {
    if (params.ell < 2) throw std::domain_error("expansion_segmented: needs l > 1");
    const double l = static_cast<double>(params.ell);
    switch (regime) {
        case SegmentedRegime::general:
            return 1.0 - (params.p + params.q) * std::log2(l) / l;
        case SegmentedRegime::del_small: {
            if (params.q != 0.0)
                throw std::domain_error("expansion_segmented: del_small requires q = 0");
            const double pd = params.p / l;
            return 1.0 + xlog2x(pd) - asymptotic_constants().k1 * pd;
        }
        case SegmentedRegime::dup_small: {
            if (params.p != 0.0)
                throw std::domain_error("expansion_segmented: dup_small requires p = 0");
            const double qi = params.q / l;
            return 1.0 + xlog2x(qi) + asymptotic_constants().k2 * qi;
        }
    }
    throw std::domain_error("expansion_segmented: unknown regime");
}

struct ExpansionReport {
    ChannelParams params;
    double expansion_value;
    double exact_value;
    double residual;  // exact_value - expansion_value
};

inline ExpansionReport make_expansion_report(const ChannelParams& params, double expansion_value,
                                             double exact_value) {
    return {params, expansion_value, exact_value, exact_value - expansion_value};
}

}  // namespace segcap
