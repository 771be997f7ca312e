#pragma once

#include "qw1/operators.hpp"

namespace qw1 {

// ── Tensor calculus on labeled regions ───────────────────────────────────────

// Kronecker product merged into canonical site order. Regions must be disjoint.
HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);

// Keeps `keep` (a subset of a's region), traces out the rest. Trace preserving.
HermitianOperator partial_trace(const HermitianOperator& a, const Region& keep);

// Traces out a single site.
HermitianOperator trace_out(const HermitianOperator& a, const Site& x);

// a tensor identity on ambient \ a.region, permuted to canonical order.
HermitianOperator embed(const HermitianOperator& a, const Region& ambient);

// ── Spectral routines ────────────────────────────────────────────────────────

Spectrum eig_herm(const HermitianOperator& a);
Spectrum eig_herm(const CMatrix& m); // raw variant used by solver internals

double trace_norm(const HermitianOperator& a);
double op_norm(const HermitianOperator& a);
double trace_norm(const CMatrix& m);
double op_norm(const CMatrix& m);

HermitianOperator matrix_exp_herm(const HermitianOperator& a);
// Requires min eigenvalue > 1e-14, else NonPositiveDefinite.
HermitianOperator matrix_log_pd(const HermitianOperator& a);

// ── Entropies and expectation values ─────────────────────────────────────────

// Von Neumann entropy, natural log. Eigenvalues in [-1e-10, 0] are clipped to
// zero; more negative throws InvariantViolation.
double vn_entropy(const DensityMatrix& rho);

// Relative entropy S(rho||sigma); +infinity when supp(rho) is not contained in
// supp(sigma) (eigenvalue threshold 1e-12).
double rel_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

double expectation(const DensityMatrix& rho, const HermitianOperator& h);
double variance(const DensityMatrix& rho, const HermitianOperator& h);

// Conditional expectation onto observables not acting on x: averages the x
// factor against the uniform state and re-tensors identity. Unital, idempotent,
// contractive in operator norm.
HermitianOperator cond_expectation(const HermitianOperator& h, const Site& x);

// ── Scalar entropy functions ─────────────────────────────────────────────────

double h2(double t);                 // binary entropy, t in [0,1]
double g_continuity(double t);       // (t+1)ln(t+1) - t ln t, t >= 0
double phi_q(double t, int q);       // h2(t) + t ln(q^2 - 1)

} // namespace qw1
