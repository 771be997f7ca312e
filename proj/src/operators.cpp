#include "qw1/operators.hpp"

#include <Eigen/Eigenvalues>

#include "qw1/errors.hpp"

namespace qw1 {

HermitianOperator HermitianOperator::from_matrix(Region region, CMatrix m) {
    if (m.rows() != region.dim() || m.cols() != region.dim()) {
        throw RegionMismatch("HermitianOperator: matrix size does not match region dimension");
    }
    const double scale = m.cwiseAbs().maxCoeff();
    const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (dev > 1e-12 * std::max(1.0, scale)) {
        throw InvariantViolation("HermitianOperator: matrix deviates from Hermitian by " +
                                 std::to_string(dev));
    }
    HermitianOperator out;
    out.region_ = std::move(region);
    out.mat_ = 0.5 * (m + m.adjoint().eval());
    return out;
}

HermitianOperator HermitianOperator::zero(const Region& region) {
    HermitianOperator out;
    out.region_ = region;
    out.mat_ = CMatrix::Zero(region.dim(), region.dim());
    return out;
}

HermitianOperator HermitianOperator::identity(const Region& region) {
    HermitianOperator out;
    out.region_ = region;
    out.mat_ = CMatrix::Identity(region.dim(), region.dim());
    return out;
}

HermitianOperator HermitianOperator::diagonal(Region region, RVector diag) {
    if (diag.size() != region.dim()) {
        throw RegionMismatch("HermitianOperator::diagonal: length does not match dimension");
    }
    HermitianOperator out;
    out.region_ = std::move(region);
    out.mat_ = diag.cast<Complex>().asDiagonal();
    return out;
}

double HermitianOperator::max_abs() const {
    if (mat_.size() == 0) return 0.0;
    return mat_.cwiseAbs().maxCoeff();
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
    if (region_ != other.region_) throw RegionMismatch("operator+: regions differ");
    HermitianOperator out;
    out.region_ = region_;
    out.mat_ = mat_ + other.mat_;
    return out;
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& other) const {
    if (region_ != other.region_) throw RegionMismatch("operator-: regions differ");
    HermitianOperator out;
    out.region_ = region_;
    out.mat_ = mat_ - other.mat_;
    return out;
}

HermitianOperator HermitianOperator::operator*(double c) const {
    HermitianOperator out;
    out.region_ = region_;
    out.mat_ = c * mat_;
    return out;
}

HermitianOperator HermitianOperator::operator-() const { return (*this) * (-1.0); }

DensityMatrix DensityMatrix::from(HermitianOperator op) {
    const double tr = op.trace();
    if (std::abs(tr - 1.0) > 1e-10) {
        throw InvariantViolation("DensityMatrix: trace " + std::to_string(tr) + " != 1");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(op.matrix(), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < -1e-10) {
        throw InvariantViolation("DensityMatrix: minimum eigenvalue " + std::to_string(lmin));
    }
    DensityMatrix out;
    out.op_ = std::move(op);
    return out;
}

DensityMatrix DensityMatrix::uniform(const Region& region) {
    return from(HermitianOperator::identity(region) * (1.0 / static_cast<double>(region.dim())));
}

DensityMatrix DensityMatrix::pure_basis_state(const Region& region, long long index) {
    if (index < 0 || index >= region.dim()) {
        throw InvariantViolation("pure_basis_state: index out of range");
    }
    RVector d = RVector::Zero(region.dim());
    d[index] = 1.0;
    return from(HermitianOperator::diagonal(region, d));
}

} // namespace qw1
