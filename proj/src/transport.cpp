#include "qw1/transport.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qw1/errors.hpp"

namespace qw1 {

namespace {

// ── Raw spectral helpers (solver-internal, no region bookkeeping) ────────────

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void hermitize(CMatrix& m) { m = 0.5 * (m + m.adjoint()).eval(); }

double herm_dot(const CMatrix& a, const CMatrix& b) {
    return a.conjugate().cwiseProduct(b).sum().real();
}

// eigenvalue soft-threshold at kappa >= 0
CMatrix soft_threshold_herm(const CMatrix& m, double kappa) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    RVector l = es.eigenvalues();
    for (Eigen::Index i = 0; i < l.size(); ++i) {
        const double a = std::abs(l[i]) - kappa;
        l[i] = a > 0.0 ? (l[i] > 0.0 ? a : -a) : 0.0;
    }
    return es.eigenvectors() * l.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

// Euclidean projection of v onto the l1 ball of radius 1
RVector l1_ball_project(const RVector& v) {
    if (v.cwiseAbs().sum() <= 1.0) return v;
    std::vector<double> a(static_cast<size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) a[static_cast<size_t>(i)] = std::abs(v[i]);
    std::sort(a.begin(), a.end(), std::greater<double>());
    double cum = 0.0, theta = 0.0;
    for (size_t k = 0; k < a.size(); ++k) {
        cum += a[k];
        const double t = (cum - 1.0) / static_cast<double>(k + 1);
        if (k + 1 == a.size() || a[k + 1] <= t) {
            theta = t;
            break;
        }
    }
    RVector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double m = std::abs(v[i]) - theta;
        out[i] = m > 0.0 ? (v[i] > 0.0 ? m : -m) : 0.0;
    }
    return out;
}

// prox of t * ||.||_inf via Moreau: V - t * Proj_{||.||_1 <= 1}(V / t)
CMatrix prox_opnorm_herm(const CMatrix& v, double t) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(v);
    const RVector l = es.eigenvalues();
    const RVector p = l1_ball_project(l / t);
    const RVector z = l - t * p;
    return es.eigenvectors() * z.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

double trace_norm_raw(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

double op_norm_raw(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

// ── Per-site index plans: trace out / embed complement without Region churn ──

struct SitePlan {
    Region keep;                    // full region without the site
    std::vector<long long> off_keep; // keep-subindex offsets in full
    std::vector<long long> off_site; // site-digit offsets in full
    long long dk = 1;
};

SitePlan make_site_plan(const Region& full, const Site& x) {
    SitePlan p;
    p.keep = full.minus(x);
    p.off_keep = subindex_offsets(full, p.keep);
    p.off_site = subindex_offsets(full, Region(full.q(), {x}));
    p.dk = p.keep.dim();
    return p;
}

CMatrix trace_out_raw(const CMatrix& a, const SitePlan& p) {
    CMatrix out = CMatrix::Zero(p.dk, p.dk);
    for (long long t = 0; t < static_cast<long long>(p.off_site.size()); ++t) {
        const long long o = p.off_site[static_cast<size_t>(t)];
        for (long long u = 0; u < p.dk; ++u) {
            const long long ru = p.off_keep[static_cast<size_t>(u)] + o;
            for (long long v = 0; v < p.dk; ++v) {
                out(u, v) += a(ru, p.off_keep[static_cast<size_t>(v)] + o);
            }
        }
    }
    return out;
}

void add_embed_rest(const CMatrix& t_mat, double factor, const SitePlan& p, CMatrix& out) {
    for (long long t = 0; t < static_cast<long long>(p.off_site.size()); ++t) {
        const long long o = p.off_site[static_cast<size_t>(t)];
        for (long long u = 0; u < p.dk; ++u) {
            const long long ru = p.off_keep[static_cast<size_t>(u)] + o;
            for (long long v = 0; v < p.dk; ++v) {
                out(ru, p.off_keep[static_cast<size_t>(v)] + o) += factor * t_mat(u, v);
            }
        }
    }
}

CMatrix embed_rest_raw(const CMatrix& t_mat, const SitePlan& p, long long dim) {
    CMatrix out = CMatrix::Zero(dim, dim);
    add_embed_rest(t_mat, 1.0, p, out);
    return out;
}

// ── Dual vector (S, T_x) of the W1 affine-projection normal equations ────────

struct DualVec {
    CMatrix S;
    std::vector<CMatrix> T;

    void setZero(long long dim, const std::vector<SitePlan>& plans) {
        S = CMatrix::Zero(dim, dim);
        T.resize(plans.size());
        for (size_t x = 0; x < plans.size(); ++x) T[x] = CMatrix::Zero(plans[x].dk, plans[x].dk);
    }
};

double dv_dot(const DualVec& a, const DualVec& b) {
    double s = herm_dot(a.S, b.S);
    for (size_t x = 0; x < a.T.size(); ++x) s += herm_dot(a.T[x], b.T[x]);
    return s;
}

void dv_axpy(DualVec& y, double alpha, const DualVec& x) {
    y.S += alpha * x.S;
    for (size_t i = 0; i < y.T.size(); ++i) y.T[i] += alpha * x.T[i];
}

// removes the component along the kernel of C^dag: (I, -I per site)
void dv_deflate(DualVec& v, const std::vector<SitePlan>& plans, long long dim) {
    double num = v.S.trace().real();
    double den = static_cast<double>(dim);
    for (size_t x = 0; x < plans.size(); ++x) {
        num -= v.T[x].trace().real();
        den += static_cast<double>(plans[x].dk);
    }
    const double c = num / den;
    v.S.diagonal().array() -= c;
    for (size_t x = 0; x < plans.size(); ++x) v.T[x].diagonal().array() += c;
}

// C(W) = (sum_x W_x, (Tr_x W_x)_x)
DualVec constraint_apply(const std::vector<CMatrix>& w, const std::vector<SitePlan>& plans,
                         long long dim) {
    DualVec out;
    out.S = CMatrix::Zero(dim, dim);
    out.T.resize(plans.size());
    for (size_t x = 0; x < plans.size(); ++x) {
        out.S += w[x];
        out.T[x] = trace_out_raw(w[x], plans[x]);
    }
    return out;
}

// C^dag(lambda)_x = S + embed_x(T_x)
std::vector<CMatrix> constraint_adjoint(const DualVec& l, const std::vector<SitePlan>& plans,
                                        long long dim) {
    std::vector<CMatrix> w(plans.size());
    for (size_t x = 0; x < plans.size(); ++x) {
        w[x] = l.S;
        add_embed_rest(l.T[x], 1.0, plans[x], w[x]);
    }
    return w;
}

/*
 * Projects V onto {X : sum_x X_x = delta, Tr_x X_x = 0} by CG on the normal
 * equations C C^dag lambda = C(V) - b. The one-dimensional kernel of C^dag is
 * deflated; the system is consistent for traceless delta.
 */
int project_affine(std::vector<CMatrix>& v, const CMatrix& delta,
                   const std::vector<SitePlan>& plans, DualVec& lambda, long long dim) {
    DualVec rhs = constraint_apply(v, plans, dim);
    rhs.S -= delta;
    dv_deflate(rhs, plans, dim);
    dv_deflate(lambda, plans, dim);

    // residual r = rhs - M lambda (warm start)
    DualVec r = rhs;
    {
        const auto w = constraint_adjoint(lambda, plans, dim);
        DualVec ml = constraint_apply(w, plans, dim);
        dv_axpy(r, -1.0, ml);
    }
    double rr = dv_dot(r, r);
    const double rhs_norm = std::sqrt(std::max(dv_dot(rhs, rhs), 0.0));
    const double tol = std::max(1e-28, 1e-24 * rhs_norm * rhs_norm);
    DualVec p = r;
    int it = 0;
    const int max_cg = 60 + 4 * static_cast<int>(plans.size() * plans.size());
    while (rr > tol && it < max_cg) {
        const auto wp = constraint_adjoint(p, plans, dim);
        DualVec mp = constraint_apply(wp, plans, dim);
        const double pmp = dv_dot(p, mp);
        if (pmp <= 0.0) break;
        const double alpha = rr / pmp;
        dv_axpy(lambda, alpha, p);
        dv_axpy(r, -alpha, mp);
        const double rr_new = dv_dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        DualVec pn = r;
        dv_axpy(pn, beta, p);
        p = std::move(pn);
        ++it;
    }
    // X = V - C^dag(lambda)
    const auto corr = constraint_adjoint(lambda, plans, dim);
    for (size_t x = 0; x < v.size(); ++x) {
        v[x] -= corr[x];
        hermitize(v[x]);
    }
    return it;
}

struct WitnessCandidate {
    double dual = -std::numeric_limits<double>::infinity();
    CMatrix h;       // Lipschitz-normalized
    double lip = 0.0; // measured Lipschitz upper bound of h (<= 1)
};

// Builds the normalized dual witness from the projection multipliers and
// evaluates Tr[delta S]/max(1, m) with m = max_x 2||S + embed(T_x)||_inf.
WitnessCandidate witness_from_multipliers(const DualVec& lambda, double rho,
                                          const CMatrix& delta,
                                          const std::vector<SitePlan>& plans, long long dim) {
    WitnessCandidate cand;
    CMatrix s = -rho * lambda.S;
    hermitize(s);
    std::vector<CMatrix> t(plans.size());
    for (size_t x = 0; x < plans.size(); ++x) {
        t[x] = -rho * lambda.T[x];
        hermitize(t[x]);
    }
    // traceless projection of S, compensated inside each T_x so the sums keep
    // their norms
    const double c = s.trace().real() / static_cast<double>(dim);
    s.diagonal().array() -= c;
    for (size_t x = 0; x < plans.size(); ++x) t[x].diagonal().array() += c;

    double m = 0.0;
    for (size_t x = 0; x < plans.size(); ++x) {
        CMatrix sx = s;
        add_embed_rest(t[x], 1.0, plans[x], sx);
        m = std::max(m, 2.0 * op_norm_raw(sx));
    }
    const double norm = std::max(1.0, m);
    cand.h = s / norm;
    cand.lip = m / norm;
    cand.dual = herm_dot(cand.h, delta);
    return cand;
}

TransportCertificate zero_certificate(const Region& region) {
    TransportCertificate cert;
    cert.witness = HermitianOperator::zero(region);
    cert.converged = true;
    return cert;
}

TransportCertificate single_site_certificate(const HermitianOperator& delta) {
    TransportCertificate cert;
    const Spectrum s = eig_herm(delta);
    const double tn = s.eigenvalues.cwiseAbs().sum();
    cert.primal = 0.5 * tn;
    RVector sgn(s.eigenvalues.size());
    for (Eigen::Index i = 0; i < sgn.size(); ++i) {
        sgn[i] = s.eigenvalues[i] > 0.0 ? 0.5 : (s.eigenvalues[i] < 0.0 ? -0.5 : 0.0);
    }
    CMatrix h = s.eigenvectors * sgn.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint();
    cert.witness = HermitianOperator::from_matrix(delta.region(), h);
    cert.witness_lipschitz = sgn.maxCoeff() - sgn.minCoeff();
    cert.dual = herm_dot(cert.witness.matrix(), delta.matrix());
    cert.gap = cert.primal - cert.dual;
    cert.decomposition.emplace_back(delta.region().site(0), delta);
    cert.converged = true;
    return cert;
}

} // namespace

TransportCertificate w1_norm(const HermitianOperator& delta, const SolverConfig& cfg) {
    const Region& region = delta.region();
    const int n = region.size();
    if (n < 1) throw RegionMismatch("w1_norm: empty region");
    const double tn0 = trace_norm(delta);
    if (std::abs(delta.trace()) > 1e-10 * std::max(1.0, tn0)) {
        throw NotTraceless("w1_norm: trace(delta) = " + std::to_string(delta.trace()));
    }
    if (tn0 <= 1e-15 * static_cast<double>(region.dim())) return zero_certificate(region);
    if (n == 1) return single_site_certificate(delta);

    const long long dim = region.dim();
    // normalize to unit trace norm; exact traceless projection
    CMatrix d = delta.matrix() / tn0;
    d.diagonal().array() -= d.trace() / static_cast<double>(dim);

    std::vector<SitePlan> plans;
    plans.reserve(static_cast<size_t>(n));
    for (int x = 0; x < n; ++x) plans.push_back(make_site_plan(region, region.site(x)));

    std::vector<CMatrix> x_mats(static_cast<size_t>(n), CMatrix::Zero(dim, dim));
    std::vector<CMatrix> y_mats = x_mats;
    std::vector<CMatrix> u_mats = x_mats;
    DualVec lambda;
    lambda.setZero(dim, plans);

    double rho = cfg.admm_rho;
    constexpr int check_every = 10;
    constexpr int adapt_every = 25;

    double best_primal = std::numeric_limits<double>::infinity();
    std::vector<CMatrix> best_x;
    WitnessCandidate best_witness;
    bool converged = false;
    int iter = 0;

    while (iter < cfg.max_iter) {
        ++iter;
        // X-update: affine projection of Y - U
        for (size_t x = 0; x < x_mats.size(); ++x) x_mats[x] = y_mats[x] - u_mats[x];
        project_affine(x_mats, d, plans, lambda, dim);

        if (iter % check_every == 0 || iter == 1) {
            double primal = 0.0;
            for (const auto& xm : x_mats) primal += 0.5 * trace_norm_raw(xm);
            if (primal < best_primal) {
                best_primal = primal;
                best_x = x_mats;
            }
            WitnessCandidate cand = witness_from_multipliers(lambda, rho, d, plans, dim);
            if (cand.dual > best_witness.dual) best_witness = cand;
            // convergence is judged on the caller's scale, not the normalized one
            const double gap = (best_primal - best_witness.dual) * tn0;
            if (gap <= cfg.tol_gap * std::max(1.0, best_primal * tn0)) {
                converged = true;
                break;
            }
        }

        // Y-update: eigenvalue soft-threshold, prox of (1/2)||.||_1 at penalty rho
        double s_res = 0.0, r_res = 0.0;
        const double kappa = 0.5 / rho;
        for (size_t x = 0; x < x_mats.size(); ++x) {
            CMatrix ynew = soft_threshold_herm(x_mats[x] + u_mats[x], kappa);
            s_res += rho * rho * (ynew - y_mats[x]).squaredNorm();
            y_mats[x] = std::move(ynew);
            u_mats[x] += x_mats[x] - y_mats[x];
            r_res += (x_mats[x] - y_mats[x]).squaredNorm();
        }

        if (cfg.adapt && iter % adapt_every == 0) {
            const double r = std::sqrt(r_res), s = std::sqrt(s_res);
            if (r > 10.0 * s && rho < 1e4) {
                rho *= 2.0;
                for (auto& u : u_mats) u *= 0.5;
            } else if (s > 10.0 * r && rho > 1e-4) {
                rho *= 0.5;
                for (auto& u : u_mats) u *= 2.0;
            }
        }
    }

    if (best_x.empty()) best_x = x_mats;

    TransportCertificate cert;
    cert.iterations = iter;
    cert.converged = converged;
    cert.primal = best_primal * tn0;
    cert.dual = best_witness.dual * tn0;
    cert.gap = cert.primal - cert.dual;
    cert.witness = HermitianOperator::from_matrix(region, best_witness.h);
    cert.witness_lipschitz = best_witness.lip;
    // feasibility of the reported decomposition
    CMatrix sum = CMatrix::Zero(dim, dim);
    double feas_site = 0.0;
    for (size_t x = 0; x < best_x.size(); ++x) {
        sum += best_x[x];
        feas_site = std::max(feas_site, trace_norm_raw(trace_out_raw(best_x[x], plans[x])));
        cert.decomposition.emplace_back(
            region.site(static_cast<int>(x)),
            HermitianOperator::from_matrix(region, best_x[x] * tn0));
    }
    cert.feas_sum = trace_norm_raw(sum - d) * tn0;
    cert.feas_site = feas_site * tn0;
    return cert;
}

TransportCertificate w1_distance(const DensityMatrix& rho, const DensityMatrix& sigma,
                                 const SolverConfig& cfg) {
    if (rho.region() != sigma.region()) throw RegionMismatch("w1_distance: regions differ");
    return w1_norm(rho.op() - sigma.op(), cfg);
}

SiteDependence partial_dependence(const HermitianOperator& h, const Site& x,
                                  const SolverConfig& cfg) {
    const Region& region = h.region();
    if (!region.contains(x)) throw RegionMismatch("partial_dependence: site not in region");
    const long long dim = region.dim();
    SiteDependence out;

    if (region.size() == 1) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix(), Eigen::EigenvaluesOnly);
        const double lmax = es.eigenvalues().maxCoeff(), lmin = es.eigenvalues().minCoeff();
        out.value = lmax - lmin;
        out.lower = out.value;
        CMatrix mid(1, 1);
        mid(0, 0) = 0.5 * (lmax + lmin);
        out.witness = HermitianOperator::from_matrix(Region(region.q(), {}), mid);
        out.converged = true;
        return out;
    }

    const SitePlan plan = make_site_plan(region, x);
    const double q = static_cast<double>(region.q());
    const CMatrix& hm = h.matrix();
    const double scale = std::max(1.0, op_norm_raw(hm));

    // two warm candidates: the conditional-expectation reduction and the
    // spectral midpoint (covers the PSD bound of value <= ||H||_inf)
    CMatrix best_a = trace_out_raw(hm, plan) / q;
    double best_val;
    {
        CMatrix r = hm;
        add_embed_rest(best_a, -1.0, plan, r);
        best_val = 2.0 * op_norm_raw(r);
    }
    {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(hm, Eigen::EigenvaluesOnly);
        const double mid = 0.5 * (es.eigenvalues().maxCoeff() + es.eigenvalues().minCoeff());
        CMatrix a = mid * CMatrix::Identity(plan.dk, plan.dk);
        CMatrix r = hm;
        add_embed_rest(a, -1.0, plan, r);
        const double v = 2.0 * op_norm_raw(r);
        if (v < best_val) {
            best_val = v;
            best_a = std::move(a);
        }
    }

    double best_lb = 0.0;
    if (best_val <= 1e-13 * scale) {
        out.value = best_val;
        out.lower = 0.0;
        out.witness = HermitianOperator::from_matrix(plan.keep, best_a);
        out.converged = true;
        return out;
    }

    double rho = cfg.admm_rho * scale;
    CMatrix a_mat = best_a;
    CMatrix z_mat = hm - embed_rest_raw(a_mat, plan, dim);
    CMatrix u_mat = CMatrix::Zero(dim, dim);
    bool converged = false;
    int iter = 0;
    constexpr int check_every = 10;
    constexpr int adapt_every = 25;

    while (iter < cfg.max_iter) {
        ++iter;
        // A-update: least-squares fit of the complement part
        a_mat = trace_out_raw(hm - z_mat - u_mat, plan) / q;
        hermitize(a_mat);
        CMatrix embedded = embed_rest_raw(a_mat, plan, dim);
        // Z-update: prox of the operator norm
        CMatrix zprev = std::move(z_mat);
        z_mat = prox_opnorm_herm(hm - embedded - u_mat, 1.0 / rho);
        hermitize(z_mat);
        // multiplier
        CMatrix resid = embedded + z_mat - hm;
        u_mat += resid;

        if (iter % check_every == 0) {
            CMatrix r = hm - embedded;
            const double v = 2.0 * op_norm_raw(r);
            if (v < best_val) {
                best_val = v;
                best_a = a_mat;
            }
            // dual witness: W = -rho U projected to Tr_x W = 0, ||W||_1 <= 1
            CMatrix w = -rho * u_mat;
            hermitize(w);
            add_embed_rest(trace_out_raw(w, plan) / q, -1.0, plan, w);
            const double tn = trace_norm_raw(w);
            if (tn > 1.0) w /= tn;
            best_lb = std::max(best_lb, 2.0 * herm_dot(hm, w));
            if (best_val - best_lb <= cfg.tol_gap * std::max(1.0, best_val)) {
                converged = true;
                break;
            }
        }
        if (cfg.adapt && iter % adapt_every == 0) {
            const double r_res = resid.norm();
            const double s_res = rho * (z_mat - zprev).norm();
            if (r_res > 10.0 * s_res && rho < 1e4 * scale) {
                rho *= 2.0;
                u_mat *= 0.5;
            } else if (s_res > 10.0 * r_res && rho > 1e-4 * scale) {
                rho *= 0.5;
                u_mat *= 2.0;
            }
        }
    }

    out.value = best_val;
    out.lower = std::min(best_lb, best_val);
    out.witness = HermitianOperator::from_matrix(plan.keep, best_a);
    out.iterations = iter;
    out.converged = converged;
    return out;
}

double lipschitz_constant(const HermitianOperator& h, const SolverConfig& cfg) {
    double l = 0.0;
    for (const Site& x : h.region().sites()) {
        l = std::max(l, partial_dependence(h, x, cfg).value);
    }
    return l;
}

double dual_pair_value(const HermitianOperator& delta, const HermitianOperator& h,
                       const SolverConfig& cfg) {
    if (delta.region() != h.region()) throw RegionMismatch("dual_pair_value: regions differ");
    if (std::abs(delta.trace()) > 1e-8 * std::max(1.0, delta.max_abs())) {
        throw NotTraceless("dual_pair_value: delta has nonzero trace");
    }
    const double pairing = herm_dot(delta.matrix(), h.matrix());
    return pairing / std::max(1.0, lipschitz_constant(h, cfg));
}

} // namespace qw1
