// Independent oracles kept deliberately separate from the library code
// paths they cross-check.
#pragma once

#include "model.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracles {

// Leading eigenvalue of a 2x2 nonnegative matrix in closed form:
// (tr + sqrt(tr^2 - 4 det)) / 2.
inline double eig2x2_leading(double a, double b, double c, double d) {
    const double tr = a + d;
    const double det = a * d - b * c;
    return 0.5 * (tr + std::sqrt(tr * tr - 4.0 * det));
}

// kappa for a 2-state model by bisection on the closed-form eigenvalue of
// the beta-weighted kernel; completely independent of the library solver.
template <typename KernelFn>
double kappa_2x2_bisect(KernelFn&& kernel_at, double lo, double hi, int iters = 200) {
    auto lam = [&](double beta) {
        double m[4];
        kernel_at(beta, m);
        return std::log(eig2x2_leading(m[0], m[1], m[2], m[3]));
    };
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (lam(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Brute-force Condition G search: try every sign assignment c over states
// (both trivial ones included). A partition witnesses failure iff every
// positive-probability atom has c(from) == c(to) for rho > 0 and
// c(from) != c(to) for rho < 0.
struct BruteForceG {
    bool holds;
    std::vector<int> a1, a_neg1; // one witness when !holds
};

inline BruteForceG brute_force_condition_g(const mmtail::MmpModel& model) {
    const int n = model.size();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        bool ok = true;
        for (const auto& ed : model.edges) {
            const bool same = ((mask >> ed.from) & 1u) == ((mask >> ed.to) & 1u);
            for (const auto& a : ed.atoms) {
                if (a.rho > 0.0 && !same) ok = false;
                if (a.rho < 0.0 && same) ok = false;
                if (!ok) break;
            }
            if (!ok) break;
        }
        if (ok) {
            BruteForceG out{false, {}, {}};
            for (int x = 0; x < n; ++x)
                (((mask >> x) & 1u) == ((mask >> 0) & 1u) ? out.a1 : out.a_neg1).push_back(x);
            return out;
        }
    }
    return {true, {}, {}};
}

// exact Pareto(alpha) sampler on [1, inf): X = U^(-1/alpha)
inline double pareto_draw(double alpha, double u) { return std::pow(u, -1.0 / alpha); }

// chi-square critical values at the 0.1% level, indexed by df (1-based)
inline double chi2_crit_001(int df) {
    static const double table[] = {0.0,    10.828, 13.816, 16.266, 18.467,
                                   20.515, 22.458, 24.322, 26.124};
    return table[df];
}

} // namespace oracles
