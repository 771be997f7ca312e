#include "qw1/operator_core.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "qw1/errors.hpp"

namespace qw1 {

namespace {

HermitianOperator wrap(Region region, CMatrix m) {
    // internal constructor path for results that are Hermitian by construction
    return HermitianOperator::from_matrix(std::move(region), std::move(m));
}

} // namespace

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.region().size() == 0) return b * a.matrix()(0, 0).real();
    if (b.region().size() == 0) return a * b.matrix()(0, 0).real();
    if (!a.region().disjoint(b.region())) {
        throw RegionOverlap("tensor: regions overlap");
    }
    const Region full = Region::join(a.region(), b.region());
    const auto offA = subindex_offsets(full, a.region());
    const auto offB = subindex_offsets(full, b.region());
    const long long da = a.dim(), db = b.dim();
    CMatrix out = CMatrix::Zero(full.dim(), full.dim());
    const CMatrix& A = a.matrix();
    const CMatrix& B = b.matrix();
    for (long long i = 0; i < da; ++i) {
        for (long long j = 0; j < da; ++j) {
            const Complex aij = A(i, j);
            if (aij == Complex(0, 0)) continue;
            for (long long k = 0; k < db; ++k) {
                for (long long l = 0; l < db; ++l) {
                    out(offA[i] + offB[k], offA[j] + offB[l]) = aij * B(k, l);
                }
            }
        }
    }
    return wrap(full, std::move(out));
}

HermitianOperator partial_trace(const HermitianOperator& a, const Region& keep) {
    if (!a.region().contains(keep)) {
        throw RegionMismatch("partial_trace: keep is not a subregion");
    }
    const Region rest = a.region().minus(keep);
    const auto offK = subindex_offsets(a.region(), keep);
    const auto offR = subindex_offsets(a.region(), rest);
    const long long dk = keep.dim(), dr = rest.dim();
    CMatrix out = CMatrix::Zero(dk, dk);
    const CMatrix& A = a.matrix();
    for (long long t = 0; t < dr; ++t) {
        const long long o = offR[t];
        for (long long u = 0; u < dk; ++u) {
            for (long long v = 0; v < dk; ++v) {
                out(u, v) += A(offK[u] + o, offK[v] + o);
            }
        }
    }
    return wrap(keep, std::move(out));
}

HermitianOperator trace_out(const HermitianOperator& a, const Site& x) {
    if (!a.region().contains(x)) throw RegionMismatch("trace_out: site not in region");
    return partial_trace(a, a.region().minus(x));
}

HermitianOperator embed(const HermitianOperator& a, const Region& ambient) {
    if (!ambient.contains(a.region())) {
        throw RegionMismatch("embed: region is not contained in ambient");
    }
    if (a.region() == ambient) return a;
    const Region rest = ambient.minus(a.region());
    const auto offA = subindex_offsets(ambient, a.region());
    const auto offR = subindex_offsets(ambient, rest);
    const long long da = a.dim(), dr = rest.dim();
    CMatrix out = CMatrix::Zero(ambient.dim(), ambient.dim());
    const CMatrix& A = a.matrix();
    for (long long t = 0; t < dr; ++t) {
        const long long o = offR[t];
        for (long long i = 0; i < da; ++i) {
            for (long long j = 0; j < da; ++j) {
                out(offA[i] + o, offA[j] + o) = A(i, j);
            }
        }
    }
    return wrap(ambient, std::move(out));
}

Spectrum eig_herm(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    if (es.info() != Eigen::Success) {
        throw InvariantViolation("eig_herm: eigensolver failed");
    }
    Spectrum s;
    s.eigenvalues = es.eigenvalues();
    s.eigenvectors = es.eigenvectors();
    return s;
}

Spectrum eig_herm(const HermitianOperator& a) { return eig_herm(a.matrix()); }

double trace_norm(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

double op_norm(const CMatrix& m) {
    if (m.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double trace_norm(const HermitianOperator& a) { return trace_norm(a.matrix()); }
double op_norm(const HermitianOperator& a) { return op_norm(a.matrix()); }

HermitianOperator matrix_exp_herm(const HermitianOperator& a) {
    const Spectrum s = eig_herm(a);
    const RVector ex = s.eigenvalues.array().exp();
    CMatrix out = s.eigenvectors * ex.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint();
    return HermitianOperator::from_matrix(a.region(), std::move(out));
}

HermitianOperator matrix_log_pd(const HermitianOperator& a) {
    const Spectrum s = eig_herm(a);
    if (s.eigenvalues.minCoeff() <= 1e-14) {
        throw NonPositiveDefinite("matrix_log_pd: minimum eigenvalue " +
                                  std::to_string(s.eigenvalues.minCoeff()));
    }
    const RVector lg = s.eigenvalues.array().log();
    CMatrix out = s.eigenvectors * lg.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint();
    return HermitianOperator::from_matrix(a.region(), std::move(out));
}

double vn_entropy(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double l = es.eigenvalues()[i];
        if (l < -1e-10) {
            throw InvariantViolation("vn_entropy: eigenvalue " + std::to_string(l));
        }
        if (l <= 0.0) continue;
        s -= l * std::log(l);
    }
    return s;
}

double rel_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.region() != sigma.region()) throw RegionMismatch("rel_entropy: regions differ");
    const Spectrum sr = eig_herm(rho.op());
    const Spectrum ss = eig_herm(sigma.op());
    constexpr double support_tol = 1e-12;
    // -S(rho) term
    double val = 0.0;
    for (Eigen::Index i = 0; i < sr.eigenvalues.size(); ++i) {
        const double l = std::max(0.0, sr.eigenvalues[i]);
        if (l > 0.0) val += l * std::log(l);
    }
    // -Tr[rho ln sigma] in sigma's eigenbasis
    const CMatrix overlap = sr.eigenvectors.adjoint() * ss.eigenvectors;
    for (Eigen::Index i = 0; i < sr.eigenvalues.size(); ++i) {
        const double l = std::max(0.0, sr.eigenvalues[i]);
        if (l <= 0.0) continue;
        for (Eigen::Index j = 0; j < ss.eigenvalues.size(); ++j) {
            const double w = l * std::norm(overlap(i, j));
            const double m = ss.eigenvalues[j];
            if (m <= support_tol) {
                if (w > support_tol) return std::numeric_limits<double>::infinity();
                continue;
            }
            val -= w * std::log(m);
        }
    }
    return val;
}

double expectation(const DensityMatrix& rho, const HermitianOperator& h) {
    if (rho.region() != h.region()) throw RegionMismatch("expectation: regions differ");
    return (rho.matrix() * h.matrix()).trace().real();
}

double variance(const DensityMatrix& rho, const HermitianOperator& h) {
    if (rho.region() != h.region()) throw RegionMismatch("variance: regions differ");
    const double mean = expectation(rho, h);
    const CMatrix centered =
        h.matrix() - mean * CMatrix::Identity(h.matrix().rows(), h.matrix().cols());
    const double v = (rho.matrix() * centered * centered).trace().real();
    return std::max(0.0, v);
}

HermitianOperator cond_expectation(const HermitianOperator& h, const Site& x) {
    if (!h.region().contains(x)) throw RegionMismatch("cond_expectation: site not in region");
    if (h.region().size() == 1) {
        // averaging the only site leaves a multiple of the identity
        const double m = h.trace() / static_cast<double>(h.dim());
        return HermitianOperator::identity(h.region()) * m;
    }
    const HermitianOperator reduced = trace_out(h, x) * (1.0 / h.region().q());
    return embed(reduced, h.region());
}

double h2(double t) {
    if (t < -1e-12 || t > 1.0 + 1e-12) throw InvariantViolation("h2: argument outside [0,1]");
    t = std::min(1.0, std::max(0.0, t));
    double s = 0.0;
    if (t > 0.0) s -= t * std::log(t);
    if (t < 1.0) s -= (1.0 - t) * std::log(1.0 - t);
    return s;
}

double g_continuity(double t) {
    if (t < 0.0) throw InvariantViolation("g_continuity: negative argument");
    double s = (t + 1.0) * std::log(t + 1.0);
    if (t > 0.0) s -= t * std::log(t);
    return s;
}

double phi_q(double t, int q) {
    return h2(t) + t * std::log(static_cast<double>(q) * q - 1.0);
}

} // namespace qw1
