#pragma once

#include <utility>
#include <vector>

#include "qw1/operator_core.hpp"

namespace qw1 {

struct SolverConfig {
    double tol_gap = 1e-5; // relative duality-gap target
    int max_iter = 200000;
    double admm_rho = 1.0; // penalty parameter
    bool adapt = true;     // residual-balancing rho adaptation
};

/*
 * Certificate for a W1 problem: a primal-feasible decomposition giving the
 * upper bound `primal`, and a Lipschitz-normalized dual witness giving the
 * lower bound `dual`. Both bounds are valid regardless of convergence state;
 * `converged` reports whether gap <= tol_gap * max(1, primal) was certified.
 */
struct TransportCertificate {
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;
    int iterations = 0;
    bool converged = true;
    HermitianOperator witness;     // ||witness||_L <= 1 by construction
    double witness_lipschitz = 0.0; // measured upper bound, <= 1
    std::vector<std::pair<Site, HermitianOperator>> decomposition;
    double feas_sum = 0.0;  // || sum_x Delta^(x) - Delta ||_1
    double feas_site = 0.0; // max_x || Tr_x Delta^(x) ||_1
};

// Minimal weighted trace-norm decomposition of a traceless Delta into
// single-site-traceless pieces; value is half the minimal sum.
TransportCertificate w1_norm(const HermitianOperator& delta, const SolverConfig& cfg = {});

TransportCertificate w1_distance(const DensityMatrix& rho, const DensityMatrix& sigma,
                                 const SolverConfig& cfg = {});

/*
 * Dependence of H on site x: twice the operator-norm distance from H to the
 * observables not acting on x. `value` is a certified upper bound attained by
 * the returned witness A (value = 2 ||H - embed(A)||_inf); `lower` is a
 * certified lower bound from a dual witness.
 */
struct SiteDependence {
    double value = 0.0;
    double lower = 0.0;
    HermitianOperator witness; // on region \ x
    int iterations = 0;
    bool converged = true;
};

SiteDependence partial_dependence(const HermitianOperator& h, const Site& x,
                                  const SolverConfig& cfg = {});

// max over sites of partial_dependence; a certified upper bound on ||H||_L.
double lipschitz_constant(const HermitianOperator& h, const SolverConfig& cfg = {});

// Tr[Delta H] / max(1, lipschitz_constant(H)): always a valid lower bound on
// ||Delta||_W1.
double dual_pair_value(const HermitianOperator& delta, const HermitianOperator& h,
                       const SolverConfig& cfg = {});

} // namespace qw1
