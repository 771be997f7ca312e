#include "qw1/bounds.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "qw1/errors.hpp"

namespace qw1 {

// ── Rng ──────────────────────────────────────────────────────────────────────

double Rng::uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
}

Complex Rng::normal_complex() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im) / std::sqrt(2.0);
}

RVector Rng::dirichlet(int n) {
    RVector g(n);
    for (int i = 0; i < n; ++i) g[i] = -std::log(1.0 - uniform());
    return g / g.sum();
}

// ── Ensembles ────────────────────────────────────────────────────────────────

HermitianOperator sample_operator(const RandomSpec& spec) {
    if (spec.ensemble != Ensemble::gue_hamiltonian) {
        throw InvariantViolation("sample_operator: ensemble is not gue_hamiltonian");
    }
    Rng rng(spec.seed);
    const long long dim = spec.region.dim();
    CMatrix a(dim, dim);
    for (long long i = 0; i < dim; ++i) {
        for (long long j = 0; j < dim; ++j) a(i, j) = rng.normal_complex();
    }
    CMatrix h = 0.5 * (a + a.adjoint());
    const double norm = op_norm(h);
    if (norm > 0.0) h /= norm;
    return HermitianOperator::from_matrix(spec.region, std::move(h));
}

DensityMatrix sample_state(const RandomSpec& spec) {
    Rng rng(spec.seed);
    const long long dim = spec.region.dim();
    switch (spec.ensemble) {
        case Ensemble::haar_pure: {
            Eigen::VectorXcd v(dim);
            for (long long i = 0; i < dim; ++i) v[i] = rng.normal_complex();
            v /= v.norm();
            CMatrix rho = v * v.adjoint();
            return DensityMatrix::from(HermitianOperator::from_matrix(spec.region, rho));
        }
        case Ensemble::hs_mixed: {
            CMatrix g(dim, dim);
            for (long long i = 0; i < dim; ++i) {
                for (long long j = 0; j < dim; ++j) g(i, j) = rng.normal_complex();
            }
            CMatrix rho = g * g.adjoint();
            rho /= rho.trace().real();
            return DensityMatrix::from(HermitianOperator::from_matrix(spec.region, rho));
        }
        case Ensemble::diag_dirichlet: {
            return DensityMatrix::from(HermitianOperator::diagonal(
                spec.region, rng.dirichlet(static_cast<int>(dim))));
        }
        default:
            throw InvariantViolation("sample_state: gue_hamiltonian is not a state ensemble");
    }
}

ProductState ProductState::from_factors(const Region& region,
                                        std::vector<HermitianOperator> factors) {
    if (static_cast<int>(factors.size()) != region.size()) {
        throw NotProduct("ProductState: one factor per site required");
    }
    for (int i = 0; i < region.size(); ++i) {
        const HermitianOperator& f = factors[static_cast<size_t>(i)];
        if (f.region().size() != 1 || f.region().site(0) != region.site(i)) {
            throw NotProduct("ProductState: factor " + std::to_string(i) +
                             " is not on the matching single site");
        }
        if (std::abs(f.trace() - 1.0) > 1e-10) {
            throw NotProduct("ProductState: factor trace != 1");
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> es(f.matrix(), Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() <= 1e-12) {
            throw NotFullRank("ProductState: factor " + std::to_string(i) +
                              " is rank deficient");
        }
    }
    ProductState out;
    out.region = region;
    out.factors = std::move(factors);
    return out;
}

DensityMatrix ProductState::joint() const {
    HermitianOperator acc = HermitianOperator::from_matrix(
        Region(region.q(), {}), CMatrix::Identity(1, 1));
    for (const HermitianOperator& f : factors) acc = tensor(acc, f);
    return DensityMatrix::from(acc);
}

HermitianOperator ProductState::log_joint() const {
    HermitianOperator acc = HermitianOperator::zero(region);
    for (const HermitianOperator& f : factors) acc = acc + embed(matrix_log_pd(f), region);
    return acc;
}

ProductState sample_product_state(uint64_t seed, const Region& region) {
    Rng rng(seed);
    std::vector<HermitianOperator> factors;
    const int q = region.q();
    for (int i = 0; i < region.size(); ++i) {
        CMatrix g(q, q);
        for (int r = 0; r < q; ++r) {
            for (int c = 0; c < q; ++c) g(r, c) = rng.normal_complex();
        }
        CMatrix rho = g * g.adjoint();
        // keep factors safely full rank
        rho += 0.05 * CMatrix::Identity(q, q);
        rho /= rho.trace().real();
        factors.push_back(
            HermitianOperator::from_matrix(Region(q, {region.site(i)}), std::move(rho)));
    }
    return ProductState::from_factors(region, std::move(factors));
}

// ── Digests, tolerances ──────────────────────────────────────────────────────

uint64_t fnv1a(const void* data, size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = 1469598103934665603ULL;
    for (size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

uint64_t digest_matrix(const CMatrix& m, uint64_t seed_hash) {
    uint64_t h = seed_hash;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const Complex z = m(i, j);
            const double re = z.real(), im = z.imag();
            h ^= fnv1a(&re, sizeof(re));
            h *= 1099511628211ULL;
            h ^= fnv1a(&im, sizeof(im));
            h *= 1099511628211ULL;
        }
    }
    return h;
}

double default_tolerance(double tol_gap, double scale) {
    return std::max(1e-9, 3.0 * tol_gap * scale);
}

namespace {

CheckResult make_result(std::string name, double lhs, double rhs, double tol, uint64_t digest) {
    CheckResult r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.tolerance_used = tol;
    r.inputs_digest = digest;
    r.pass = r.slack >= -tol;
    return r;
}

} // namespace

// ── Checkers ─────────────────────────────────────────────────────────────────

CheckResult check_entropy_continuity(const DensityMatrix& rho, const DensityMatrix& sigma,
                                     const TransportCertificate& cert, double tolerance) {
    if (rho.region() != sigma.region()) {
        throw RegionMismatch("check_entropy_continuity: regions differ");
    }
    const int q = rho.region().q();
    const double n = static_cast<double>(rho.region().size());
    const double lhs = std::abs(vn_entropy(rho) - vn_entropy(sigma)) / n;
    const double w_ub = cert.primal / n;
    const double w_peak = 1.0 - 1.0 / (static_cast<double>(q) * q);
    uint64_t digest = digest_matrix(rho.matrix());
    digest = digest_matrix(sigma.matrix(), digest);
    CheckResult r;
    if (w_ub <= w_peak) {
        // monotone branch of phi: an upper bound on W1 can only enlarge the rhs
        r = make_result("entropy_continuity", lhs, phi_q(w_ub, q), tolerance, digest);
    } else {
        // beyond the peak the claim is dominated by ln q
        r = make_result("entropy_continuity", lhs, std::log(static_cast<double>(q)), tolerance,
                        digest);
        r.pass = true;
        r.details["auto_pass_beyond_peak"] = 1.0;
    }
    r.details["w_upper"] = w_ub;
    return r;
}

CheckResult check_entropy_continuity_old(const DensityMatrix& rho, const DensityMatrix& sigma,
                                         const TransportCertificate& cert, double tolerance) {
    if (rho.region() != sigma.region()) {
        throw RegionMismatch("check_entropy_continuity_old: regions differ");
    }
    const int q = rho.region().q();
    const double n = static_cast<double>(rho.region().size());
    const double lhs = std::abs(vn_entropy(rho) - vn_entropy(sigma));
    const double w1 = cert.primal;
    const double rhs =
        g_continuity(w1) + w1 * std::log(static_cast<double>(q) * q * n);
    uint64_t digest = digest_matrix(rho.matrix());
    digest = digest_matrix(sigma.matrix(), digest);
    CheckResult r = make_result("entropy_continuity_old", lhs, rhs, tolerance, digest);
    // observation only: whether the newer per-site bound is tighter here
    const double w_ub = w1 / n;
    const double w_peak = 1.0 - 1.0 / (static_cast<double>(q) * q);
    const double new_rhs =
        n * (w_ub <= w_peak ? phi_q(w_ub, q) : std::log(static_cast<double>(q)));
    r.details["new_bound_rhs"] = new_rhs;
    r.details["new_bound_tighter"] = new_rhs <= rhs ? 1.0 : 0.0;
    return r;
}

CheckResult check_gaussian_concentration(const HermitianOperator& h, const ProductState& omega,
                                         const SolverConfig& cfg, double tolerance) {
    if (h.region() != omega.region) {
        throw RegionMismatch("check_gaussian_concentration: regions differ");
    }
    const HermitianOperator exponent = h + omega.log_joint();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(exponent.matrix(), Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();
    const double lhs =
        std::log((es.eigenvalues().array() - lmax).exp().sum()) + lmax;
    double dep_sq = 0.0;
    for (const Site& x : h.region().sites()) {
        const double d = partial_dependence(h, x, cfg).value; // certified upper bound
        dep_sq += d * d;
    }
    const double rhs = expectation(omega.joint(), h) + 0.5 * dep_sq;
    return make_result("gaussian_concentration", lhs, rhs, tolerance,
                       digest_matrix(h.matrix()));
}

CheckResult check_poincare(const HermitianOperator& h, const ProductState& omega,
                           const SolverConfig& cfg, double tolerance) {
    if (h.region() != omega.region) throw RegionMismatch("check_poincare: regions differ");
    const double lhs = variance(omega.joint(), h);
    double rhs = 0.0;
    double max_dep = 0.0;
    for (const Site& x : h.region().sites()) {
        const double d = partial_dependence(h, x, cfg).value;
        rhs += d * d;
        max_dep = std::max(max_dep, d);
    }
    CheckResult r = make_result("poincare", lhs, rhs, tolerance, digest_matrix(h.matrix()));
    r.details["var_per_site"] = lhs / static_cast<double>(h.region().size());
    r.details["dep_quadratic_mean_sq"] = rhs / static_cast<double>(h.region().size());
    r.details["max_site_dependence"] = max_dep;
    return r;
}

CheckResult check_marton(const DensityMatrix& rho, const DensityMatrix& sigma_product,
                         const TransportCertificate& cert, double tolerance) {
    if (rho.region() != sigma_product.region()) {
        throw RegionMismatch("check_marton: regions differ");
    }
    const double n = static_cast<double>(rho.region().size());
    const double rel = rel_entropy(rho, sigma_product);
    // primal (upper bound) on the squared side: conservative, only valid runs pass
    const double lhs = cert.primal * cert.primal;
    const double rhs = 0.5 * n * rel;
    uint64_t digest = digest_matrix(rho.matrix());
    digest = digest_matrix(sigma_product.matrix(), digest);
    CheckResult r = make_result("marton", lhs, rhs, tolerance, digest);
    r.details["lhs_dual_based"] = cert.dual * cert.dual;
    return r;
}

CheckResult check_marton_k(const DensityMatrix& rho_k, const DensityMatrix& sigma, int k,
                           const TransportCertificate& cert, double tolerance) {
    const double n = static_cast<double>(sigma.region().size());
    if (rho_k.region().size() != k * sigma.region().size()) {
        throw RegionMismatch("check_marton_k: rho_k is not on k copies");
    }
    // sigma^{otimes k} on rho_k's region, built from translated copies
    HermitianOperator sig_k = HermitianOperator::from_matrix(
        Region(sigma.region().q(), {}), CMatrix::Identity(1, 1));
    for (int copy = 0; copy < k; ++copy) {
        std::vector<Site> sites;
        for (int i = copy * sigma.region().size(); i < (copy + 1) * sigma.region().size(); ++i) {
            sites.push_back(rho_k.region().site(i));
        }
        sig_k = tensor(sig_k, HermitianOperator::from_matrix(
                                  Region(sigma.region().q(), sites), sigma.matrix()));
    }
    const double rel = rel_entropy(rho_k, DensityMatrix::from(sig_k));
    const double lhs = cert.primal * cert.primal;
    const double rhs = 2.0 * static_cast<double>(k) * n * n * rel;
    uint64_t digest = digest_matrix(rho_k.matrix());
    digest = digest_matrix(sigma.matrix(), digest);
    CheckResult r = make_result("marton_k", lhs, rhs, tolerance, digest);
    r.details["lhs_dual_based"] = cert.dual * cert.dual;
    return r;
}

CheckResult check_w1_sandwich(const TransportCertificate& cert, const HermitianOperator& delta,
                              double tolerance) {
    const double tn = trace_norm(delta);
    const double n = static_cast<double>(delta.region().size());
    // lower side with the primal, upper side with the dual: false passes are
    // impossible for true certificates
    const double slack_lower = cert.primal - 0.5 * tn;
    const double slack_upper = 0.5 * n * tn - cert.dual;
    CheckResult r;
    r.name = "w1_sandwich";
    r.lhs = 0.5 * tn;
    r.rhs = 0.5 * n * tn;
    r.slack = std::min(slack_lower, slack_upper);
    r.tolerance_used = tolerance;
    r.inputs_digest = digest_matrix(delta.matrix());
    r.pass = r.slack >= -tolerance;
    r.details["primal"] = cert.primal;
    r.details["dual"] = cert.dual;
    return r;
}

CheckResult check_local_bound(const TransportCertificate& cert, const HermitianOperator& delta,
                              const Region& sub_region, double tolerance) {
    const HermitianOperator reduced = partial_trace(delta, delta.region().minus(sub_region));
    const double reduced_mass = trace_norm(reduced);
    const double q = static_cast<double>(delta.region().q());
    const double rhs = (q * q - 1.0) / (q * q) * static_cast<double>(sub_region.size()) *
                       trace_norm(delta);
    CheckResult r = make_result("local_bound", cert.dual, rhs, tolerance,
                                digest_matrix(delta.matrix()));
    r.details["traced_mass_residual"] = reduced_mass;
    return r;
}

CheckResult check_superadditivity(const TransportCertificate& joint,
                                  const TransportCertificate& part_a,
                                  const TransportCertificate& part_b, bool product_inputs,
                                  double tolerance) {
    const double lhs = part_a.primal + part_b.primal;
    const double rhs = joint.primal;
    CheckResult r;
    r.name = product_inputs ? "additivity_products" : "superadditivity";
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = product_inputs ? -std::abs(rhs - lhs) : rhs - lhs;
    r.tolerance_used = tolerance;
    r.inputs_digest = fnv1a(&joint.primal, sizeof(double));
    r.pass = r.slack >= -tolerance;
    r.details["joint_gap"] = joint.gap;
    r.details["parts_gap"] = part_a.gap + part_b.gap;
    return r;
}

CheckResult check_triangle(const TransportCertificate& rho_tau,
                           const TransportCertificate& rho_sigma,
                           const TransportCertificate& sigma_tau, double tolerance) {
    const double lhs = rho_tau.primal;
    const double rhs = rho_sigma.primal + sigma_tau.primal;
    CheckResult r = make_result("triangle", lhs, rhs, tolerance,
                                fnv1a(&rho_tau.primal, sizeof(double)));
    return r;
}

CheckResult check_pressure_bound(const Interaction& phi, const Region& box,
                                 const SolverConfig& cfg, double tolerance) {
    const double n = static_cast<double>(box.size());
    const double lhs = pressure_sequence(phi, {box.size()}).front();
    const double lip = phi_lipschitz(phi, cfg);
    const double rhs = std::log(static_cast<double>(phi.q())) + 0.5 * lip * lip -
                       uniform_specific_energy(phi);
    CheckResult r;
    r = make_result("pressure_bound", lhs, rhs, tolerance, fnv1a(&lhs, sizeof(double)));
    r.details["finite_volume_proxy"] = 1.0; // lhs approximates the pressure limit
    r.details["lipschitz_stabilized"] = lip;
    r.details["box_sites"] = n;
    return r;
}

CheckResult check_specific_entropy_continuity(const std::vector<DensityMatrix>& rho_family,
                                              const std::vector<DensityMatrix>& sigma_family,
                                              const std::vector<TransportCertificate>& certs,
                                              double tolerance) {
    if (rho_family.size() != sigma_family.size() || rho_family.size() != certs.size()) {
        throw InconsistentMarginals("check_specific_entropy_continuity: length mismatch");
    }
    const int q = rho_family.front().region().q();
    const double w_peak = 1.0 - 1.0 / (static_cast<double>(q) * q);
    double worst_slack = std::numeric_limits<double>::infinity();
    double lhs_last = 0.0, rhs_last = 0.0;
    CheckResult r;
    for (size_t i = 0; i < rho_family.size(); ++i) {
        const double n = static_cast<double>(rho_family[i].region().size());
        const double lhs =
            std::abs(vn_entropy(rho_family[i]) - vn_entropy(sigma_family[i])) / n;
        const double w_ub = certs[i].primal / n;
        const double rhs =
            w_ub <= w_peak ? phi_q(w_ub, q) : std::log(static_cast<double>(q));
        const bool auto_pass = w_ub > w_peak;
        const double slack = auto_pass ? std::abs(rhs) : rhs - lhs;
        if (slack < worst_slack) worst_slack = slack;
        lhs_last = lhs;
        rhs_last = rhs;
        r.details["w_volume_" + std::to_string(i + 1)] = w_ub;
    }
    r.name = "specific_entropy_continuity";
    r.lhs = lhs_last;
    r.rhs = rhs_last;
    r.slack = worst_slack;
    r.tolerance_used = tolerance;
    r.inputs_digest = digest_matrix(rho_family.back().matrix());
    r.pass = worst_slack >= -tolerance;
    // the family check presumes the supplied marginals are consistent
    r.details["consistency_assumed"] = 1.0;
    return r;
}

} // namespace qw1
