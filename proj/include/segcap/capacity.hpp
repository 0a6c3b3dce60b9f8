#pragma once

// Numerical side of the block channel: Blahut-Arimoto with a certified
// capacity bracket, the extremal distributions behind the upper bound, and
// the grid maximizations behind the relative-gap figures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "segcap/bounds.hpp"
#include "segcap/channel.hpp"
#include "segcap/parallel.hpp"

namespace segcap {

struct BASolution {
    double capacity_bits_per_symbol;
    Distribution input_dist;
    long iterations;
    double lower_gap;  // bits per symbol, current mutual information
    double upper_gap;  // bits per symbol, max_x D(Q(.|x) || P_Y)
    bool converged;
};

// Alternating maximization over the sparse law. The two half steps collapse
// into D_x = D(Q(.|x) || P_Y) and P'(x) proportional to P(x) 2^{D_x}; the
// bracket I <= C <= max_x D_x is evaluated every iteration and the run stops
// once its width is <= tol bits (unnormalized), so results carry an accuracy
// certificate. Zero-mass inputs stay at exactly zero.
inline BASolution blahut_arimoto(const ChannelParams& params, double tol = 1e-6,
                                 long max_iter = 100000, const Distribution* init = nullptr,
                                 int enumeration_cap = kDefaultEnumerationCap) {
    if (!(tol > 0.0)) throw std::domain_error("blahut_arimoto: tol must be positive");
    if (max_iter < 1) throw std::domain_error("blahut_arimoto: max_iter must be >= 1");
    const SparseTransitionLaw law = transition_law(params, enumeration_cap);
    const std::size_t nx = law.num_inputs();

    std::vector<double> px(nx, 1.0 / static_cast<double>(nx));
    if (init) {
        validate_distribution(*init);
        if (init->size() != nx) throw std::domain_error("blahut_arimoto: init must cover all inputs");
        std::fill(px.begin(), px.end(), 0.0);
        for (std::size_t i = 0; i < nx; ++i) {
            const PackedWord& w = init->support[i];
            if (w.len != params.ell) throw std::domain_error("blahut_arimoto: init word length != ell");
            px[w.bits] = init->mass[i];
        }
    }

    std::vector<double> hrow(nx, 0.0);  // H(Y|X=x), constant across iterations
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t e = law.row_begin[x]; e < law.row_begin[x + 1]; ++e)
            hrow[x] -= xlog2x(law.entries[e].prob);

    std::vector<double> py(law.num_outputs());
    std::vector<double> log_py(law.num_outputs());
    std::vector<double> dkl(nx);
    double info = 0.0, max_d = 0.0;
    long iter = 0;
    bool converged = false;

    while (iter < max_iter) {
        ++iter;
        std::fill(py.begin(), py.end(), 0.0);
        for (std::size_t x = 0; x < nx; ++x) {
            if (px[x] == 0.0) continue;
            for (std::size_t e = law.row_begin[x]; e < law.row_begin[x + 1]; ++e)
                py[law.entries[e].out] += px[x] * law.entries[e].prob;
        }
        for (std::size_t y = 0; y < py.size(); ++y)
            log_py[y] = py[y] > 0.0 ? std::log2(py[y]) : 0.0;

        info = 0.0;
        max_d = -std::numeric_limits<double>::infinity();
        for (std::size_t x = 0; x < nx; ++x) {
            double cross = 0.0;
            bool unreachable = false;
            for (std::size_t e = law.row_begin[x]; e < law.row_begin[x + 1]; ++e) {
                if (py[law.entries[e].out] == 0.0) {
                    unreachable = true;  // D is +inf; only possible for zero-mass x
                    break;
                }
                cross += law.entries[e].prob * log_py[law.entries[e].out];
            }
            dkl[x] = unreachable ? std::numeric_limits<double>::infinity() : -hrow[x] - cross;
            info += px[x] > 0.0 ? px[x] * dkl[x] : 0.0;
            if (dkl[x] > max_d) max_d = dkl[x];
        }
        if (max_d - info <= tol) {
            converged = true;
            break;
        }
        if (iter == max_iter) break;

        double z = 0.0;
        for (std::size_t x = 0; x < nx; ++x) {
            px[x] = px[x] > 0.0 ? px[x] * std::exp2(dkl[x] - info) : 0.0;
            z += px[x];
        }
        for (double& v : px) v /= z;
    }

    Distribution dist;
    dist.support.reserve(nx);
    dist.mass.assign(px.begin(), px.end());
    for (std::uint64_t x = 0; x < nx; ++x) dist.support.push_back({x, params.ell});
    const double l = static_cast<double>(params.ell);
    return {info / l, std::move(dist), iter, info / l, max_d / l, converged};
}

// P*(x) proportional to 2^{-c Hhat(x)}, c = (p+q)/(1-p-q); at p+q = 1 the
// limit concentrates on the two constant words.
inline Distribution lagrange_optimal_input(const ChannelParams& params) {
    if (params.ell < 2) throw std::domain_error("lagrange_optimal_input: needs l > 1");
    detail::check_enumeration_width(params.ell);
    const int l = params.ell;
    const std::uint64_t n = std::uint64_t{1} << l;
    Distribution d;
    d.support.reserve(n);
    d.mass.assign(n, 0.0);
    for (std::uint64_t x = 0; x < n; ++x) d.support.push_back({x, l});
    if (params.p + params.q >= 1.0 - 1e-12) {
        d.mass[0] = 0.5;
        d.mass[n - 1] = 0.5;
        return d;
    }
    const double c = (params.p + params.q) / (1.0 - params.p - params.q);
    double z = 0.0;
    for (std::uint64_t x = 0; x < n; ++x) {
        d.mass[x] = std::exp2(-c * empirical_runlength_entropy(PackedWord{x, l}));
        z += d.mass[x];
    }
    for (double& m : d.mass) m /= z;
    return d;
}

// The two output "slices" of the entropy-maximization argument. Both are
// sub-probability measures (total mass p and q), so they are returned raw
// and are not run through validate_distribution.
inline std::pair<Distribution, Distribution> maxent_output_slices(const ChannelParams& params) {
    if (params.ell < 2) throw std::domain_error("maxent_output_slices: needs l > 1");
    detail::check_enumeration_width(params.ell + 1);
    const int l = params.ell;
    Distribution shorter, longer;
    const std::uint64_t ns = std::uint64_t{1} << (l - 1);
    shorter.support.reserve(ns);
    shorter.mass.assign(ns, params.p / static_cast<double>(ns));
    for (std::uint64_t y = 0; y < ns; ++y) shorter.support.push_back({y, l - 1});
    const std::uint64_t nl = std::uint64_t{1} << (l + 1);
    const double mass_long = params.q / static_cast<double>(nl - 2);
    for (std::uint64_t y = 0; y < nl; ++y) {
        const PackedWord w{y, l + 1};
        longer.support.push_back(w);
        longer.mass.push_back(run_count(w) == l + 1 ? 0.0 : mass_long);
    }
    return {std::move(shorter), std::move(longer)};
}

struct GapReport {
    int ell;
    double delta_u_percent;
    double delta_l_percent;
    std::pair<double, double> argmax_pq;  // argmax of the larger of the two gaps
    int non_converged;                    // grid points excluded from the maxima
};

// Grid maxima of (U - C_SI)/C_SI and (C_SI - max_alpha L)/C_SI over the
// simplex restricted to p + q <= max_pq. Grid maxima are lower bounds on the
// true maxima. Points where BA fails to converge are excluded and counted.
inline GapReport relative_gaps(int ell, double pq_grid_step, double ba_tol,
                               double max_pq = 1.0,
                               int enumeration_cap = kDefaultEnumerationCap, int jobs = 0) {
    if (ell < 2) throw std::domain_error("relative_gaps: needs l > 1");
    if (!(pq_grid_step > 0.0)) throw std::domain_error("relative_gaps: grid step must be positive");
    const int steps = static_cast<int>(std::round(1.0 / pq_grid_step));
    std::vector<std::pair<double, double>> grid;
    for (int i = 0; i <= steps; ++i)
        for (int j = 0; i + j <= steps; ++j) {
            const double p = i * pq_grid_step, q = j * pq_grid_step;
            if (p + q <= max_pq + 1e-12) grid.emplace_back(p, q);
        }

    struct PointResult {
        double du, dl;
        bool ok;
    };
    std::vector<PointResult> res(grid.size());
    parallel_for(grid.size(), jobs, [&](std::size_t i) {
        const auto [p, q] = grid[i];
        const ChannelParams params{ell, p, q};
        const BASolution ba = blahut_arimoto(params, ba_tol, 100000, nullptr, enumeration_cap);
        if (!ba.converged) {
            res[i] = {0.0, 0.0, false};
            return;
        }
        const double c = ba.capacity_bits_per_symbol;
        const double u = upper_bound_u(params, enumeration_cap);
        const double lo = optimize_alpha(params).value;
        res[i] = {(u - c) / c, (c - lo) / c, true};
    });

    double du = 0.0, dl = 0.0;
    std::pair<double, double> arg_du{0.0, 0.0}, arg_dl{0.0, 0.0};
    int bad = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!res[i].ok) {
            ++bad;
            continue;
        }
        if (res[i].du > du) {
            du = res[i].du;
            arg_du = grid[i];
        }
        if (res[i].dl > dl) {
            dl = res[i].dl;
            arg_dl = grid[i];
        }
    }
    return {ell, 100.0 * du, 100.0 * dl, du >= dl ? arg_du : arg_dl, bad};
}

// max over p in [0, 1-q] of (max_alpha L - L at alpha = 1/2) / max_alpha L.
inline double uniform_vs_optimized_gap(int ell, double q, double p_grid_step,
                                       double alpha_tol = 1e-7) {
    if (ell < 2) throw std::domain_error("uniform_vs_optimized_gap: needs l > 1");
    if (!(q >= 0.0) || !(q <= 1.0)) throw std::domain_error("uniform_vs_optimized_gap: q outside [0,1]");
    if (!(p_grid_step > 0.0))
        throw std::domain_error("uniform_vs_optimized_gap: grid step must be positive");
    double best = 0.0;
    for (double p = 0.0; p <= 1.0 - q + 1e-12; p += p_grid_step) {
        const ChannelParams params{ell, std::min(p, 1.0 - q), q};
        const double opt = optimize_alpha(params, alpha_tol).value;
        const double uni = lower_bound_uniform(params);
        if (opt > 0.0) best = std::max(best, (opt - uni) / opt);
    }
    // the p = 1-q endpoint, in case the step does not land on it
    const ChannelParams edge{ell, 1.0 - q, q};
    const double opt = optimize_alpha(edge, alpha_tol).value;
    if (opt > 0.0) best = std::max(best, (opt - lower_bound_uniform(edge)) / opt);
    return best;
}

}  // namespace segcap
