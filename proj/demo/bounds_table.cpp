// Prints the sandwich L <= C_SI <= U for a deletion-only channel at two
// block lengths, the same slice the figure data is built from.

#include <cstdio>

#include "segcap/segcap.hpp"

int main() {
    std::printf("%4s %6s  %12s %12s %12s %12s\n", "ell", "p", "L(0.5)", "max_a L", "C_SI", "U");
    for (int ell : {2, 8}) {
        for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const segcap::ChannelParams params{ell, p, 0.0};
            const double luni = segcap::lower_bound_uniform(params);
            const double lopt = segcap::optimize_alpha(params).value;
            const segcap::BASolution ba = segcap::blahut_arimoto(params);
            const double u = segcap::upper_bound_u(params);
            std::printf("%4d %6.2f  %12.8f %12.8f %12.8f %12.8f%s\n", ell, p, luni, lopt,
                        ba.capacity_bits_per_symbol, u, ba.converged ? "" : "  (not converged)");
        }
    }
    return 0;
}
