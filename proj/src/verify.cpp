#include "qw1/verify.hpp"

#include <algorithm>
#include <thread>

#include "qw1/errors.hpp"

namespace qw1 {

namespace {

const std::vector<std::string> kSuites = {"all", "entropy", "transport", "lattice"};

HermitianOperator traceless_gue(uint64_t seed, const Region& region) {
    RandomSpec spec{seed, Ensemble::gue_hamiltonian, region};
    HermitianOperator h = sample_operator(spec);
    const double shift = h.trace() / static_cast<double>(region.dim());
    return h - HermitianOperator::identity(region) * shift;
}

DensityMatrix mixed(uint64_t seed, const Region& region) {
    return sample_state({seed, Ensemble::hs_mixed, region});
}

// one transport sample: sandwich, local bound, superadditivity/additivity,
// triangle, diagonal recovery
void transport_sample(uint64_t seed, int n_sites, const SolverConfig& solver,
                      std::vector<CheckResult>& out) {
    const Region region = Region::range1d(2, 0, n_sites - 1);
    Rng pick(seed);

    {
        const HermitianOperator delta = traceless_gue(mix_seed(seed, 1), region);
        const auto cert = w1_norm(delta, solver);
        const double tol = default_tolerance(solver.tol_gap, std::max(1.0, cert.primal));
        out.push_back(check_w1_sandwich(cert, delta, tol));
    }
    {
        // Delta with vanishing marginal outside the sub region: common factor
        const int k = 1 + static_cast<int>(pick.next_u64() % static_cast<uint64_t>(n_sites - 1));
        std::vector<Site> sub_sites(region.sites().begin(), region.sites().begin() + k);
        const Region sub(2, sub_sites);
        const Region rest = region.minus(sub);
        const DensityMatrix a = mixed(mix_seed(seed, 2), sub);
        const DensityMatrix b = mixed(mix_seed(seed, 3), sub);
        const DensityMatrix tau = mixed(mix_seed(seed, 4), rest);
        const HermitianOperator delta = tensor(a.op() - b.op(), tau.op());
        const auto cert = w1_norm(delta, solver);
        const double tol = default_tolerance(solver.tol_gap, std::max(1.0, cert.primal));
        out.push_back(check_local_bound(cert, delta, sub, tol));
    }
    {
        const Region part_a(2, {region.site(0)});
        const Region part_b = region.minus(part_a);
        const bool product = (seed % 2) == 0;
        DensityMatrix rho = mixed(mix_seed(seed, 5), region);
        DensityMatrix sig = mixed(mix_seed(seed, 6), region);
        if (product) {
            rho = DensityMatrix::from(tensor(partial_trace(rho.op(), part_a),
                                             partial_trace(rho.op(), part_b)));
            sig = DensityMatrix::from(tensor(partial_trace(sig.op(), part_a),
                                             partial_trace(sig.op(), part_b)));
        }
        const auto joint = w1_distance(rho, sig, solver);
        const auto ca = w1_norm(partial_trace(rho.op(), part_a) - partial_trace(sig.op(), part_a),
                                solver);
        const auto cb = w1_norm(partial_trace(rho.op(), part_b) - partial_trace(sig.op(), part_b),
                                solver);
        const double tol = default_tolerance(solver.tol_gap, std::max(1.0, joint.primal));
        out.push_back(check_superadditivity(joint, ca, cb, product, tol));
    }
    {
        const DensityMatrix rho = mixed(mix_seed(seed, 7), region);
        const DensityMatrix sig = mixed(mix_seed(seed, 8), region);
        const DensityMatrix tau = mixed(mix_seed(seed, 9), region);
        const auto c_rt = w1_distance(rho, tau, solver);
        const auto c_rs = w1_distance(rho, sig, solver);
        const auto c_st = w1_distance(sig, tau, solver);
        const double tol = default_tolerance(solver.tol_gap, std::max(1.0, c_rt.primal));
        out.push_back(check_triangle(c_rt, c_rs, c_st, tol));
    }
    {
        const int q = (seed % 3 == 0) ? 3 : 2;
        const Region creg = Region::range1d(q, 0, std::min(n_sites, 3) - 1);
        const DensityMatrix mu_state = sample_state({mix_seed(seed, 10),
                                                     Ensemble::diag_dirichlet, creg});
        const DensityMatrix nu_state = sample_state({mix_seed(seed, 11),
                                                     Ensemble::diag_dirichlet, creg});
        const ClassicalDistribution mu =
            ClassicalDistribution::from(creg, mu_state.matrix().diagonal().real());
        const ClassicalDistribution nu =
            ClassicalDistribution::from(creg, nu_state.matrix().diagonal().real());
        const double classical = hamming_w1(mu, nu).value;
        const auto cert = w1_norm(mu_state.op() - nu_state.op(), solver);
        CheckResult r;
        r.name = "diagonal_recovery";
        r.lhs = classical;
        r.rhs = cert.primal;
        r.slack = std::min(classical - cert.dual, cert.primal - classical);
        r.tolerance_used = default_tolerance(solver.tol_gap, std::max(1.0, classical));
        r.inputs_digest = digest_matrix(mu_state.matrix());
        r.pass = r.slack >= -r.tolerance_used;
        r.details["dual"] = cert.dual;
        out.push_back(r);
    }
}

void entropy_sample(uint64_t seed, int n_sites, const SolverConfig& solver,
                    std::vector<CheckResult>& out) {
    const Region region = Region::range1d(2, 0, n_sites - 1);
    {
        const DensityMatrix rho = mixed(mix_seed(seed, 1), region);
        const DensityMatrix sig = mixed(mix_seed(seed, 2), region);
        const auto cert = w1_distance(rho, sig, solver);
        const double tol = default_tolerance(solver.tol_gap, 1.0);
        out.push_back(check_entropy_continuity(rho, sig, cert, tol));
        out.push_back(check_entropy_continuity_old(rho, sig, cert, tol));
    }
    {
        const DensityMatrix rho = mixed(mix_seed(seed, 3), region);
        const DensityMatrix sig = sample_product_state(mix_seed(seed, 4), region).joint();
        const auto cert = w1_distance(rho, sig, solver);
        const double tol =
            default_tolerance(solver.tol_gap, std::max(1.0, 2.0 * cert.primal));
        out.push_back(check_marton(rho, sig, cert, tol));
    }
    {
        const int k = 2 + static_cast<int>(seed % 2);
        const Region single(2, {Site{0}});
        const Region copies = Region::range1d(2, 0, k - 1);
        const DensityMatrix sigma = mixed(mix_seed(seed, 5), single);
        const DensityMatrix rho_k = mixed(mix_seed(seed, 6), copies);
        const auto cert = w1_norm([&] {
            HermitianOperator sk = HermitianOperator::from_matrix(Region(2, {}),
                                                                  CMatrix::Identity(1, 1));
            for (int c = 0; c < k; ++c) {
                sk = tensor(sk, HermitianOperator::from_matrix(Region(2, {Site{c}}),
                                                               sigma.matrix()));
            }
            return rho_k.op() - sk;
        }(), solver);
        const double tol =
            default_tolerance(solver.tol_gap, std::max(1.0, 2.0 * cert.primal));
        out.push_back(check_marton_k(rho_k, sigma, k, cert, tol));
    }
}

void lattice_sample(uint64_t seed, int n_sites, const SolverConfig& solver,
                    std::vector<CheckResult>& out) {
    const Region region = Region::range1d(2, 0, n_sites - 1);
    const HermitianOperator h = sample_operator({mix_seed(seed, 1),
                                                 Ensemble::gue_hamiltonian, region});
    const ProductState omega = sample_product_state(mix_seed(seed, 2), region);
    const double tol = default_tolerance(solver.tol_gap, 1.0);
    out.push_back(check_gaussian_concentration(h, omega, solver, tol));
    out.push_back(check_poincare(h, omega, solver, tol));

    // interaction-level Lipschitz bound: solver value <= 2 ||Phi||_r
    {
        Rng rng(mix_seed(seed, 3));
        const double j = 0.2 + 0.8 * rng.uniform();
        const double field = rng.uniform();
        const Interaction phi = Interaction::ising_1d(j, field);
        const double lip = phi_lipschitz(phi, solver);
        CheckResult r;
        r.name = "lipschitz_interaction_bound";
        r.lhs = lip;
        r.rhs = 2.0 * phi_r_norm(phi, 0.0);
        r.slack = r.rhs - r.lhs;
        r.tolerance_used = tol;
        r.inputs_digest = fnv1a(&j, sizeof(double));
        r.pass = r.slack >= -tol;
        out.push_back(r);
    }
}

} // namespace

const std::vector<std::string>& suite_names() { return kSuites; }

uint64_t mix_seed(uint64_t base, uint64_t index) {
    uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

SuiteReport run_suite(const std::string& suite, const SuiteOptions& options) {
    if (std::find(kSuites.begin(), kSuites.end(), suite) == kSuites.end()) {
        throw InvariantViolation("run_suite: unknown suite '" + suite + "'");
    }
    const bool all = suite == "all";
    std::vector<std::vector<CheckResult>> per_sample(static_cast<size_t>(options.samples));

    auto worker = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            const int n = options.sizes[static_cast<size_t>(i) % options.sizes.size()];
            const uint64_t seed = mix_seed(options.seed, static_cast<uint64_t>(i));
            auto& bucket = per_sample[static_cast<size_t>(i)];
            if (all || suite == "transport") {
                transport_sample(seed, n, options.solver, bucket);
            }
            if (all || suite == "entropy") {
                entropy_sample(seed, n, options.solver, bucket);
            }
            if (all || suite == "lattice") {
                lattice_sample(seed, n, options.solver, bucket);
            }
        }
    };

    int threads = options.threads > 0
                      ? options.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, options.samples == 0 ? 1 : options.samples));
    if (threads <= 1 || options.samples <= 1) {
        worker(0, options.samples);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (options.samples + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const int b = t * chunk, e = std::min(options.samples, (t + 1) * chunk);
            if (b < e) pool.emplace_back(worker, b, e);
        }
        for (auto& th : pool) th.join();
    }

    SuiteReport report;
    for (auto& bucket : per_sample) {
        for (auto& r : bucket) {
            if (!r.pass) ++report.failures;
            report.results.push_back(std::move(r));
        }
    }
    return report;
}

} // namespace qw1
