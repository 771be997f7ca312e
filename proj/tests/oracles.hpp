// Test-only independent oracles. These deliberately avoid the ADMM code paths
// in src/transport.cpp: the subgradient oracle works on the dual side with
// conditional-expectation shrinkage, and the diagonal oracle is a direct
// oscillation maximum.
#pragma once

#include <algorithm>
#include <cmath>

#include "qw1/operator_core.hpp"

namespace qw1_test {

using qw1::CMatrix;
using qw1::HermitianOperator;
using qw1::Region;
using qw1::Site;

// Projected subgradient ascent on max Tr[Delta H] with per-site dependence
// kept <= 1 by shrinking toward the conditional expectation. Every iterate
// yields a valid lower bound Tr[Delta H] / max(1, L_ub(H)).
inline double dual_subgradient_lower_bound(const HermitianOperator& delta, int iters) {
    const Region& region = delta.region();
    HermitianOperator h = qw1::HermitianOperator::zero(region);
    double best = 0.0;
    const double scale = std::max(1.0, qw1::trace_norm(delta));
    for (int k = 1; k <= iters; ++k) {
        const double step = 0.5 / (scale * std::sqrt(static_cast<double>(k)));
        h = h + delta * step;
        for (const Site& x : region.sites()) {
            const HermitianOperator psi = qw1::cond_expectation(h, x);
            const double dep = 2.0 * qw1::op_norm(h - psi);
            if (dep > 1.0) h = psi + (h - psi) * (1.0 / dep);
        }
        double lip_ub = 0.0;
        for (const Site& x : region.sites()) {
            lip_ub = std::max(lip_ub, 2.0 * qw1::op_norm(h - qw1::cond_expectation(h, x)));
        }
        const double val = (delta.matrix().conjugate().cwiseProduct(h.matrix())).sum().real() /
                           std::max(1.0, lip_ub);
        best = std::max(best, val);
    }
    return best;
}

// Exact site dependence for diagonal observables: the maximal oscillation of
// the diagonal along the x digit, over all configurations of the other sites.
inline double diagonal_dependence_oracle(const HermitianOperator& h, const Site& x) {
    const Region& region = h.region();
    const Region rest = region.minus(x);
    const auto off_rest = qw1::subindex_offsets(region, rest);
    const auto off_x = qw1::subindex_offsets(region, Region(region.q(), {x}));
    double worst = 0.0;
    for (long long t = 0; t < rest.dim(); ++t) {
        double lo = 1e300, hi = -1e300;
        for (size_t s = 0; s < off_x.size(); ++s) {
            const double v = h.matrix()(off_rest[static_cast<size_t>(t)] + off_x[s],
                                        off_rest[static_cast<size_t>(t)] + off_x[s])
                                 .real();
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        worst = std::max(worst, hi - lo);
    }
    return worst;
}

// Brute grid search over diagonal complements A = diag(a, b) for 2-qubit
// diagonal observables; step 1e-3 over [-2, 2]^2.
inline double grid_dependence_2q_diag(const HermitianOperator& h, const Site& x) {
    const Region& region = h.region();
    const Region rest = region.minus(x);
    const auto off_rest = qw1::subindex_offsets(region, rest);
    const auto off_x = qw1::subindex_offsets(region, Region(region.q(), {x}));
    double best = 1e300;
    for (int ia = -2000; ia <= 2000; ++ia) {
        for (int ib = -2000; ib <= 2000; ++ib) {
            const double av[2] = {ia * 1e-3, ib * 1e-3};
            double m = 0.0;
            for (size_t t = 0; t < off_rest.size(); ++t) {
                for (size_t s = 0; s < off_x.size(); ++s) {
                    const double v =
                        h.matrix()(off_rest[t] + off_x[s], off_rest[t] + off_x[s]).real() -
                        av[t];
                    m = std::max(m, std::abs(v));
                }
            }
            best = std::min(best, m);
        }
    }
    return 2.0 * best;
}

} // namespace qw1_test
