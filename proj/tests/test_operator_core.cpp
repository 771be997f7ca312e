#include <doctest.h>

#include <cmath>

#include "qw1/bounds.hpp"
#include "qw1/errors.hpp"
#include "qw1/operator_core.hpp"

using namespace qw1;

namespace {

Region qubit(int site) { return Region(2, {Site{site}}); }

HermitianOperator pauli_z(int site) {
    RVector d(2);
    d << 1.0, -1.0;
    return HermitianOperator::diagonal(qubit(site), d);
}

HermitianOperator pauli_x(int site) {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return HermitianOperator::from_matrix(qubit(site), m);
}

HermitianOperator random_herm(uint64_t seed, const Region& r) {
    return sample_operator({seed, Ensemble::gue_hamiltonian, r});
}

DensityMatrix random_state(uint64_t seed, const Region& r) {
    return sample_state({seed, Ensemble::hs_mixed, r});
}

} // namespace

TEST_CASE("region canonical ordering and invariants") {
    Region a(2, {Site{1}, Site{0}});
    Region b(2, {Site{0}, Site{1}});
    CHECK(a == b);
    CHECK(a.site(0) == Site{0});
    CHECK(a.dim() == 4);
    CHECK_THROWS_AS(Region(2, {Site{0}, Site{0}}), InvariantViolation);
    CHECK_THROWS_AS(Region(1, {Site{0}}), InvariantViolation);

    const long long old_cap = dim_cap();
    set_dim_cap(8);
    CHECK_THROWS_AS(Region::box1d(2, 4), SizeCap);
    CHECK_NOTHROW(Region::box1d(2, 3));
    set_dim_cap(old_cap);
}

TEST_CASE("hermiticity is enforced at construction") {
    CMatrix m(2, 2);
    m << 1.0, Complex(0, 1), Complex(0, 1), 1.0; // not Hermitian
    CHECK_THROWS_AS(HermitianOperator::from_matrix(qubit(0), m), InvariantViolation);
}

TEST_CASE("tensor: identity and diagonal cases") {
    const auto i4 = tensor(HermitianOperator::identity(qubit(0)),
                           HermitianOperator::identity(qubit(1)));
    CHECK(i4.matrix().isApprox(CMatrix::Identity(4, 4)));

    const auto zz = tensor(pauli_z(0), pauli_z(1));
    RVector expect(4);
    expect << 1, -1, -1, 1;
    CHECK((zz.matrix().diagonal().real() - expect).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(zz.matrix().cwiseAbs().sum() == doctest::Approx(4.0)); // diagonal only
}

TEST_CASE("tensor: trace multiplies, overlap throws") {
    for (uint64_t s = 0; s < 200; ++s) {
        const auto a = random_herm(2 * s + 1, qubit(0));
        const auto b = random_herm(2 * s + 2, qubit(1));
        const auto t = tensor(a, b);
        CHECK(t.trace() == doctest::Approx(a.trace() * b.trace()).epsilon(1e-12));
    }
    CHECK_THROWS_AS(tensor(pauli_z(0), pauli_x(0)), RegionOverlap);
}

TEST_CASE("tensor merges into canonical order") {
    // B on site 0 (most significant), A on site 1: tensor(A, B) must equal B (x) A
    const auto a = pauli_z(1);
    CMatrix bm(2, 2);
    bm << 2, 0, 0, 3;
    const auto b = HermitianOperator::from_matrix(qubit(0), bm);
    const auto t = tensor(a, b);
    RVector expect(4);
    expect << 2, -2, 3, -3; // diag of B (x) Z with site 0 most significant
    CHECK((t.matrix().diagonal().real() - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("partial_trace: product marginals and identity") {
    for (uint64_t s = 0; s < 20; ++s) {
        const auto rho = random_state(3 * s + 1, qubit(0));
        const auto sig = random_state(3 * s + 2, qubit(1));
        const auto joint = tensor(rho.op(), sig.op());
        const auto back = partial_trace(joint, qubit(0));
        CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(partial_trace(joint, qubit(0)).trace() == doctest::Approx(joint.trace()));
    }
    const Region both(2, {Site{0}, Site{1}});
    const auto half = partial_trace(HermitianOperator::identity(both), qubit(0));
    CHECK(half.matrix().isApprox(2.0 * CMatrix::Identity(2, 2)));
    CHECK_THROWS_AS(partial_trace(pauli_z(0), qubit(1)), RegionMismatch);
}

TEST_CASE("partial_trace of the Bell projector is maximally mixed") {
    const Region both(2, {Site{0}, Site{1}});
    CMatrix bell = CMatrix::Zero(4, 4);
    bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
    const auto proj = HermitianOperator::from_matrix(both, bell);
    const auto marg = partial_trace(proj, qubit(0));
    CHECK(marg.matrix().isApprox(0.5 * CMatrix::Identity(2, 2)));
}

TEST_CASE("embed: identity, trace factors, norm invariance") {
    const Region both(2, {Site{0}, Site{1}});
    CHECK(embed(HermitianOperator::identity(qubit(0)), both)
              .matrix()
              .isApprox(CMatrix::Identity(4, 4)));

    for (uint64_t s = 0; s < 20; ++s) {
        const auto a = random_herm(s + 7, qubit(0));
        const auto big = embed(a, both);
        // partial_trace(embed(A)) = q^{|rest|} A
        const auto back = partial_trace(big, qubit(0));
        CHECK((back.matrix() - 2.0 * a.matrix()).cwiseAbs().maxCoeff() < 1e-12);
        // operator norm via the eigenvalue oracle on both sides
        CHECK(op_norm(big) == doctest::Approx(op_norm(a)).epsilon(1e-10));
    }
}

TEST_CASE("embed respects the basis convention") {
    // A on site 1 embedded into {0,1}: result is I (x) A
    CMatrix am(2, 2);
    am << 5, 1, 1, 7;
    const auto a = HermitianOperator::from_matrix(qubit(1), am);
    const Region both(2, {Site{0}, Site{1}});
    const auto big = embed(a, both).matrix();
    CMatrix expect = CMatrix::Zero(4, 4);
    expect.block(0, 0, 2, 2) = am;
    expect.block(2, 2, 2, 2) = am;
    CHECK(big.isApprox(expect));
}

TEST_CASE("eig_herm basics and reconstruction") {
    RVector d(3);
    d << 3, 1, 2;
    const auto s = eig_herm(HermitianOperator::diagonal(Region(3, {Site{0}}), d));
    CHECK(s.eigenvalues[0] == doctest::Approx(1));
    CHECK(s.eigenvalues[1] == doctest::Approx(2));
    CHECK(s.eigenvalues[2] == doctest::Approx(3));

    const auto sx = eig_herm(pauli_x(0));
    CHECK(sx.eigenvalues[0] == doctest::Approx(-1));
    CHECK(sx.eigenvalues[1] == doctest::Approx(1));

    const Region three = Region::range1d(2, 0, 2);
    const auto h = random_herm(42, three);
    const auto sp = eig_herm(h);
    const CMatrix rebuilt = sp.eigenvectors *
                            sp.eigenvalues.cast<Complex>().asDiagonal() *
                            sp.eigenvectors.adjoint();
    CHECK((rebuilt - h.matrix()).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + op_norm(h)));
}

TEST_CASE("norms") {
    CHECK(trace_norm(pauli_z(0)) == doctest::Approx(2.0));
    CHECK(op_norm(pauli_z(0)) == doctest::Approx(1.0));
    CHECK(trace_norm(HermitianOperator::zero(qubit(0))) == doctest::Approx(0.0));
    for (uint64_t s = 0; s < 50; ++s) {
        const auto h = random_herm(s + 100, Region::range1d(2, 0, 1));
        CHECK(trace_norm(h) >= std::abs(h.trace()) - 1e-12);
    }
}

TEST_CASE("matrix exp and log") {
    const auto e0 = matrix_exp_herm(HermitianOperator::zero(qubit(0)));
    CHECK(e0.matrix().isApprox(CMatrix::Identity(2, 2)));

    RVector d(2);
    d << std::log(2.0), 0.0;
    const auto e = matrix_exp_herm(HermitianOperator::diagonal(qubit(0), d));
    CHECK(e.matrix()(0, 0).real() == doctest::Approx(2.0));
    CHECK(e.matrix()(1, 1).real() == doctest::Approx(1.0));

    for (uint64_t s = 0; s < 10; ++s) {
        const auto h = random_herm(s + 5, Region::range1d(2, 0, 1));
        const auto round = matrix_log_pd(matrix_exp_herm(h));
        CHECK((round.matrix() - h.matrix()).cwiseAbs().maxCoeff() < 1e-8);
    }
    RVector neg(2);
    neg << 1.0, -0.5;
    CHECK_THROWS_AS(matrix_log_pd(HermitianOperator::diagonal(qubit(0), neg)),
                    NonPositiveDefinite);
}

TEST_CASE("entropies") {
    const Region both = Region::range1d(2, 0, 1);
    CHECK(vn_entropy(DensityMatrix::uniform(both)) == doctest::Approx(2.0 * std::log(2.0)));
    CHECK(vn_entropy(DensityMatrix::pure_basis_state(both, 2)) == doctest::Approx(0.0));

    // diagonal relative entropy equals the classical KL divergence
    Rng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const RVector p = rng.dirichlet(4);
        const RVector q = rng.dirichlet(4);
        const auto rho = DensityMatrix::from(HermitianOperator::diagonal(both, p));
        const auto sig = DensityMatrix::from(HermitianOperator::diagonal(both, q));
        double kl = 0.0;
        for (int i = 0; i < 4; ++i) kl += p[i] * std::log(p[i] / q[i]);
        CHECK(rel_entropy(rho, sig) == doctest::Approx(kl).epsilon(1e-9));
    }

    // S(rho||rho) = 0 and concavity spot check
    for (uint64_t s = 0; s < 10; ++s) {
        const auto rho = random_state(s + 31, both);
        const auto sig = random_state(s + 77, both);
        CHECK(std::abs(rel_entropy(rho, rho)) < 1e-9);
        const auto mix = DensityMatrix::from(rho.op() * 0.5 + sig.op() * 0.5);
        CHECK(vn_entropy(mix) >= 0.5 * vn_entropy(rho) + 0.5 * vn_entropy(sig) - 1e-9);
    }

    // support mismatch signals +infinity
    const auto pure = DensityMatrix::pure_basis_state(both, 0);
    const auto other = DensityMatrix::pure_basis_state(both, 3);
    CHECK(std::isinf(rel_entropy(pure, other)));
}

TEST_CASE("conditional expectation") {
    const Region both = Region::range1d(2, 0, 1);
    const auto id = HermitianOperator::identity(both);
    CHECK(cond_expectation(id, Site{0}).matrix().isApprox(id.matrix()));

    const auto zx = embed(pauli_z(0), both);
    CHECK(cond_expectation(zx, Site{0}).max_abs() < 1e-14);

    const auto zz = tensor(pauli_z(0), pauli_z(1));
    CHECK(cond_expectation(zz, Site{0}).max_abs() < 1e-14);

    const auto zy = embed(pauli_z(1), both);
    CHECK(cond_expectation(zy, Site{0}).matrix().isApprox(zy.matrix()));

    for (uint64_t s = 0; s < 10; ++s) {
        const auto h = random_herm(s + 201, both);
        const auto psi = cond_expectation(h, Site{0});
        // idempotent and contractive
        CHECK((cond_expectation(psi, Site{0}).matrix() - psi.matrix()).cwiseAbs().maxCoeff() <
              1e-12);
        CHECK(op_norm(psi) <= op_norm(h) + 1e-10);
        // commutes with unitaries supported on the averaged site
        Rng rng(s + 900);
        for (int rep = 0; rep < 10; ++rep) {
            CMatrix g(2, 2);
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) g(i, j) = rng.normal_complex();
            }
            const Eigen::HouseholderQR<CMatrix> qr(g);
            CMatrix u_small = qr.householderQ();
            // unitary on site 0 only: U = u_small (x) I with site 0 most significant
            CMatrix u_full = CMatrix::Zero(4, 4);
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    u_full.block(2 * i, 2 * j, 2, 2) =
                        u_small(i, j) * CMatrix::Identity(2, 2);
                }
            }
            const CMatrix comm = u_full * psi.matrix() - psi.matrix() * u_full;
            CHECK(comm.cwiseAbs().maxCoeff() < 1e-11);
        }
    }
}

TEST_CASE("variance") {
    const auto rho = DensityMatrix::uniform(qubit(0));
    CHECK(variance(rho, HermitianOperator::identity(qubit(0))) == doctest::Approx(0.0));
    CHECK(variance(rho, pauli_z(0)) == doctest::Approx(1.0));

    // additivity over a product state for disjoint single-site terms
    const Region both = Region::range1d(2, 0, 1);
    for (uint64_t s = 0; s < 10; ++s) {
        const auto r0 = random_state(s + 11, qubit(0));
        const auto r1 = random_state(s + 13, qubit(1));
        const auto joint = DensityMatrix::from(tensor(r0.op(), r1.op()));
        const auto h0 = random_herm(s + 17, qubit(0));
        const auto h1 = random_herm(s + 19, qubit(1));
        const auto h = embed(h0, both) + embed(h1, both);
        const double sum = variance(r0, h0) + variance(r1, h1);
        CHECK(variance(joint, h) == doctest::Approx(sum).epsilon(1e-9));
    }
}

TEST_CASE("scalar entropy functions") {
    CHECK(h2(0.5) == doctest::Approx(std::log(2.0)));
    CHECK(h2(0.0) == doctest::Approx(0.0));
    CHECK(h2(1.0) == doctest::Approx(0.0));
    CHECK(g_continuity(0.0) == doctest::Approx(0.0));
    for (int q : {2, 3}) {
        const double peak = 1.0 - 1.0 / (static_cast<double>(q) * q);
        CHECK(phi_q(peak, q) == doctest::Approx(2.0 * std::log(q)).epsilon(1e-12));
        // increasing on [0, peak]
        double prev = -1.0;
        for (int k = 0; k <= 20; ++k) {
            const double v = phi_q(peak * k / 20.0, q);
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
}
