#pragma once

// Probability assignments over finite sets of packed words. The struct is
// plain data; validate_distribution() enforces the normalization invariant
// where one is required (output "slices" of the entropy-maximization
// argument are sub-probability measures and skip it).

#include <cmath>
#include <stdexcept>
#include <vector>

#include "segcap/combinatorics.hpp"
#include "segcap/word.hpp"

namespace segcap {

struct Distribution {
    std::vector<PackedWord> support;
    std::vector<double> mass;

    std::size_t size() const { return support.size(); }
};

inline void validate_distribution(const Distribution& d, double tol = 1e-12) {
    if (d.support.size() != d.mass.size())
        throw std::domain_error("distribution: support/mass size mismatch");
    double s = 0.0;
    for (double m : d.mass) {
        if (!(m >= 0.0)) throw std::domain_error("distribution: negative mass");
        s += m;
    }
    if (std::abs(s - 1.0) > tol) throw std::domain_error("distribution: masses do not sum to 1");
}

inline double total_mass(const Distribution& d) {
    double s = 0.0;
    for (double m : d.mass) s += m;
    return s;
}

inline double entropy_bits(const Distribution& d) {
    double h = 0.0;
    for (double m : d.mass) h -= xlog2x(m);
    return h;
}

}  // namespace segcap
