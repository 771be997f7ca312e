#include <doctest.h>

#include <cmath>

#include "qw1/bounds.hpp"
#include "qw1/errors.hpp"
#include "qw1/verify.hpp"

using namespace qw1;

namespace {

Region qubits(int n) { return Region::range1d(2, 0, n - 1); }
const SolverConfig kCfg;

} // namespace

TEST_CASE("rng determinism and ensembles") {
    const Region r = qubits(2);
    for (Ensemble e : {Ensemble::haar_pure, Ensemble::hs_mixed, Ensemble::diag_dirichlet}) {
        const auto a = sample_state({77, e, r});
        const auto b = sample_state({77, e, r});
        CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() == 0.0); // identical seeds
        const auto c = sample_state({78, e, r});
        CHECK((a.matrix() - c.matrix()).cwiseAbs().maxCoeff() > 0.0);
    }
    const auto h1 = sample_operator({5, Ensemble::gue_hamiltonian, r});
    const auto h2 = sample_operator({5, Ensemble::gue_hamiltonian, r});
    CHECK((h1.matrix() - h2.matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(op_norm(h1) == doctest::Approx(1.0)); // rescaled to unit norm

    // haar_pure gives pure states, diag_dirichlet sums to one
    const auto pure = sample_state({9, Ensemble::haar_pure, r});
    CHECK(vn_entropy(pure) < 1e-10);
    const auto diag = sample_state({9, Ensemble::diag_dirichlet, r});
    CHECK(diag.matrix().diagonal().real().sum() == doctest::Approx(1.0));
}

TEST_CASE("hs_mixed ensemble mean approaches the maximally mixed state") {
    const Region r = qubits(1);
    const int n = 10000;
    CMatrix mean = CMatrix::Zero(2, 2);
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto rho = sample_state({mix_seed(42, static_cast<uint64_t>(i)),
                                       Ensemble::hs_mixed, r});
        mean += rho.matrix();
        sq += (rho.matrix() - 0.5 * CMatrix::Identity(2, 2)).squaredNorm();
    }
    mean /= static_cast<double>(n);
    const double sigma = std::sqrt(sq / n); // empirical per-sample spread
    CHECK((mean - 0.5 * CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() <=
          3.0 * sigma / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("product states: construction and validation") {
    const Region r = qubits(2);
    const auto omega = sample_product_state(3, r);
    CHECK(omega.factors.size() == 2);
    const auto joint = omega.joint();
    CHECK(joint.op().trace() == doctest::Approx(1.0));
    // log of the joint equals the sum of embedded factor logs
    const auto direct = matrix_log_pd(joint.op());
    CHECK((direct.matrix() - omega.log_joint().matrix()).cwiseAbs().maxCoeff() < 1e-9);

    // rank-deficient factor rejected
    RVector degenerate(2);
    degenerate << 1.0, 0.0;
    std::vector<HermitianOperator> bad;
    bad.push_back(HermitianOperator::diagonal(Region(2, {Site{0}}), degenerate));
    bad.push_back(omega.factors[1]);
    CHECK_THROWS_AS(ProductState::from_factors(r, std::move(bad)), NotFullRank);

    std::vector<HermitianOperator> wrong_site;
    wrong_site.push_back(omega.factors[1]);
    wrong_site.push_back(omega.factors[0]);
    CHECK_THROWS_AS(ProductState::from_factors(r, std::move(wrong_site)), NotProduct);
}

TEST_CASE("check_entropy_continuity: trivial, analytic, batch") {
    const Region one = qubits(1);
    const auto rho = DensityMatrix::pure_basis_state(one, 0);
    const auto sigma = DensityMatrix::uniform(one);

    // identical states: slack 0, pass
    const auto same = check_entropy_continuity(rho, rho, w1_distance(rho, rho, kCfg), 1e-9);
    CHECK(same.pass);
    CHECK(same.lhs == doctest::Approx(0.0));

    // analytic one-qubit case: lhs = ln 2, W1 = 1/2,
    // rhs = h2(1/2) + (1/2) ln 3, slack = (ln 3)/2
    const auto cert = w1_distance(rho, sigma, kCfg);
    CHECK(cert.primal == doctest::Approx(0.5));
    const auto r = check_entropy_continuity(rho, sigma, cert, 1e-6);
    CHECK(r.pass);
    CHECK(r.lhs == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(r.rhs == doctest::Approx(std::log(2.0) + 0.5 * std::log(3.0)).epsilon(1e-12));
    CHECK(r.slack == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-10));

    // seeded random pairs on 2 qubits
    for (uint64_t s = 0; s < 25; ++s) {
        const auto a = sample_state({mix_seed(1000, s), Ensemble::hs_mixed, qubits(2)});
        const auto b = sample_state({mix_seed(2000, s), Ensemble::hs_mixed, qubits(2)});
        const auto c = w1_distance(a, b, kCfg);
        CHECK(check_entropy_continuity(a, b, c, 1e-6).pass);
        CHECK(check_entropy_continuity_old(a, b, c, 1e-6).pass);
    }
}

TEST_CASE("check_gaussian_concentration: equality cases and the scalar case") {
    const Region one = qubits(1);
    std::vector<HermitianOperator> fac;
    fac.push_back(HermitianOperator::identity(one) * 0.5);
    const auto omega = ProductState::from_factors(one, std::move(fac));

    // H = 0: both sides vanish
    const auto zero = check_gaussian_concentration(HermitianOperator::zero(one), omega, kCfg,
                                                   1e-9);
    CHECK(zero.pass);
    CHECK(zero.lhs == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(zero.slack == doctest::Approx(0.0).epsilon(1e-10));

    // H = c I: both sides shift by c, slack stays 0
    const auto shift = check_gaussian_concentration(HermitianOperator::identity(one) * 1.7,
                                                    omega, kCfg, 1e-9);
    CHECK(shift.pass);
    CHECK(shift.slack == doctest::Approx(0.0).epsilon(1e-9));

    // H = Z, omega = I/2: ln cosh 1 <= 2, slack to 12 digits
    RVector z(2);
    z << 1, -1;
    const auto scalar = check_gaussian_concentration(HermitianOperator::diagonal(one, z),
                                                     omega, kCfg, 1e-9);
    CHECK(scalar.pass);
    CHECK(scalar.lhs == doctest::Approx(std::log(std::cosh(1.0))).epsilon(1e-12));
    CHECK(scalar.rhs == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("check_poincare: scalar case and batch") {
    const Region one = qubits(1);
    std::vector<HermitianOperator> fac;
    fac.push_back(HermitianOperator::identity(one) * 0.5);
    const auto omega = ProductState::from_factors(one, std::move(fac));
    const auto id = check_poincare(HermitianOperator::identity(one), omega, kCfg, 1e-9);
    CHECK(id.pass);
    CHECK(id.lhs == doctest::Approx(0.0));

    RVector z(2);
    z << 1, -1;
    const auto scalar = check_poincare(HermitianOperator::diagonal(one, z), omega, kCfg, 1e-9);
    CHECK(scalar.pass);
    CHECK(scalar.lhs == doctest::Approx(1.0)); // Var = <Z^2> - <Z>^2 = 1
    CHECK(scalar.rhs == doctest::Approx(4.0).epsilon(1e-9));

    for (uint64_t s = 0; s < 20; ++s) {
        const Region r = qubits(3);
        const auto h = sample_operator({mix_seed(3000, s), Ensemble::gue_hamiltonian, r});
        const auto w = sample_product_state(mix_seed(4000, s), r);
        CHECK(check_poincare(h, w, kCfg, 1e-9).pass);
        CHECK(check_gaussian_concentration(h, w, kCfg, 1e-9).pass);
    }
}

TEST_CASE("check_marton and the k-fold version") {
    const Region two = qubits(2);
    // rho = |00><00|, sigma = uniform: S(rho||sigma) = ln 4, so W1 <= sqrt(ln 4)
    const auto rho = DensityMatrix::pure_basis_state(two, 0);
    const auto sigma = DensityMatrix::uniform(two);
    const auto cert = w1_distance(rho, sigma, kCfg);
    CHECK(cert.primal == doctest::Approx(1.0).epsilon(1e-4)); // Hamming mean to uniform
    const auto r = check_marton(rho, sigma, cert, 1e-6);
    CHECK(r.pass);
    CHECK(r.rhs == doctest::Approx(std::log(4.0)).epsilon(1e-10));
    CHECK(cert.primal <= std::sqrt(r.rhs) + 1e-4);

    for (uint64_t s = 0; s < 15; ++s) {
        const auto a = sample_state({mix_seed(5000, s), Ensemble::hs_mixed, two});
        const auto prod = sample_product_state(mix_seed(6000, s), two).joint();
        const auto c = w1_distance(a, prod, kCfg);
        CHECK(check_marton(a, prod, c,
                           default_tolerance(kCfg.tol_gap, std::max(1.0, 2.0 * c.primal)))
                  .pass);
    }

    // k-fold with |Lambda| = 1
    for (uint64_t s = 0; s < 10; ++s) {
        const int k = 2 + static_cast<int>(s % 2);
        const Region copies = qubits(k);
        const auto sigma1 = sample_state({mix_seed(7000, s), Ensemble::hs_mixed, qubits(1)});
        const auto rho_k = sample_state({mix_seed(8000, s), Ensemble::hs_mixed, copies});
        HermitianOperator sk =
            HermitianOperator::from_matrix(Region(2, {}), CMatrix::Identity(1, 1));
        for (int c = 0; c < k; ++c) {
            sk = tensor(sk,
                        HermitianOperator::from_matrix(Region(2, {Site{c}}), sigma1.matrix()));
        }
        const auto cert_k = w1_norm(rho_k.op() - sk, kCfg);
        CHECK(check_marton_k(rho_k, sigma1, k, cert_k,
                             default_tolerance(kCfg.tol_gap, std::max(1.0, 2.0 * cert_k.primal)))
                  .pass);
    }
}

TEST_CASE("check_pressure_bound on the Ising family") {
    for (double j : {0.1, 0.5, 1.0}) {
        for (double h : {0.0, 0.3}) {
            const Interaction phi = Interaction::ising_1d(j, h);
            const auto r = check_pressure_bound(phi, Region::box1d(2, 8), kCfg, 1e-6);
            CHECK(r.pass);
        }
    }
    // free interaction: equality ln q <= ln q
    const auto free_check =
        check_pressure_bound(Interaction(1, 2, {}), Region::box1d(2, 4), kCfg, 1e-9);
    CHECK(free_check.pass);
    CHECK(free_check.slack == doctest::Approx(0.0));
}

TEST_CASE("check_specific_entropy_continuity on diagonal families") {
    Eigen::MatrixXd flip(2, 2);
    flip << 0.9, 0.1, 0.1, 0.9;
    RVector half(2);
    half << 0.5, 0.5;
    const auto markov = StationaryProcess::markov(flip, half);
    const auto iid = StationaryProcess::iid(half);
    std::vector<DensityMatrix> rho_fam, sig_fam;
    std::vector<TransportCertificate> certs;
    for (int a = 1; a <= 2; ++a) {
        rho_fam.push_back(diagonal_embed(marginal(markov, a)));
        sig_fam.push_back(diagonal_embed(marginal(iid, a)));
        certs.push_back(w1_distance(rho_fam.back(), sig_fam.back(), kCfg));
    }
    const auto r = check_specific_entropy_continuity(rho_fam, sig_fam, certs, 1e-6);
    CHECK(r.pass);
    CHECK(r.details.count("consistency_assumed") == 1);

    // identical families: slack equals the rhs at w = 0
    std::vector<TransportCertificate> zero_certs;
    for (int a = 1; a <= 2; ++a) {
        zero_certs.push_back(w1_distance(rho_fam[a - 1], rho_fam[a - 1], kCfg));
    }
    CHECK(check_specific_entropy_continuity(rho_fam, rho_fam, zero_certs, 1e-9).pass);
}

TEST_CASE("sandwich / local bound / superadditivity checkers") {
    const Region r = qubits(2);
    for (uint64_t s = 0; s < 10; ++s) {
        HermitianOperator delta =
            sample_operator({mix_seed(9000, s), Ensemble::gue_hamiltonian, r});
        delta = delta -
                HermitianOperator::identity(r) * (delta.trace() / static_cast<double>(r.dim()));
        const auto cert = w1_norm(delta, kCfg);
        const double tol = default_tolerance(kCfg.tol_gap, std::max(1.0, cert.primal));
        CHECK(check_w1_sandwich(cert, delta, tol).pass);
    }
    // digests are stable and order-independent inputs give equal results
    const auto d1 = digest_matrix(CMatrix::Identity(2, 2));
    const auto d2 = digest_matrix(CMatrix::Identity(2, 2));
    CHECK(d1 == d2);
}

TEST_CASE("run_suite: deterministic and clean on all suites") {
    SuiteOptions opt;
    opt.seed = 99;
    opt.samples = 2;
    opt.sizes = {2};
    opt.threads = 2;
    for (const std::string& name : {"transport", "entropy", "lattice"}) {
        const auto rep1 = run_suite(name, opt);
        CHECK(rep1.failures == 0);
        CHECK(rep1.results.size() > 0);
        // determinism across runs and thread counts
        SuiteOptions serial = opt;
        serial.threads = 1;
        const auto rep2 = run_suite(name, serial);
        REQUIRE(rep1.results.size() == rep2.results.size());
        for (size_t i = 0; i < rep1.results.size(); ++i) {
            CHECK(rep1.results[i].name == rep2.results[i].name);
            CHECK(rep1.results[i].slack == rep2.results[i].slack); // bitwise
        }
    }
    CHECK_THROWS_AS(run_suite("bogus", opt), InvariantViolation);
}
