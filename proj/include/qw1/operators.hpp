#pragma once

#include <Eigen/Dense>

#include "qw1/region.hpp"

namespace qw1 {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/*
 * Dense self-adjoint operator on the labeled Hilbert space of a Region.
 * Hermiticity is checked (max-entry deviation <= 1e-12 * scale) and the
 * stored matrix is exactly symmetrized.
 */
class HermitianOperator {
public:
    HermitianOperator() = default;

    static HermitianOperator from_matrix(Region region, CMatrix m);
    static HermitianOperator zero(const Region& region);
    static HermitianOperator identity(const Region& region);
    static HermitianOperator diagonal(Region region, RVector diag);

    const Region& region() const { return region_; }
    const CMatrix& matrix() const { return mat_; }
    long long dim() const { return region_.dim(); }

    double trace() const { return mat_.trace().real(); }
    double max_abs() const;

    HermitianOperator operator+(const HermitianOperator& other) const;
    HermitianOperator operator-(const HermitianOperator& other) const;
    HermitianOperator operator*(double c) const;
    HermitianOperator operator-() const;

private:
    Region region_;
    CMatrix mat_;
};

inline HermitianOperator operator*(double c, const HermitianOperator& a) { return a * c; }

// Eigendecomposition with ascending eigenvalues; U Lambda U^dag reconstructs
// the input within 1e-9 * (1 + |M|_inf).
struct Spectrum {
    RVector eigenvalues;  // ascending
    CMatrix eigenvectors; // column per eigenvalue
};

/*
 * Positive-semidefinite, unit-trace HermitianOperator.
 * trace within 1e-10 of 1; minimum eigenvalue >= -1e-10.
 */
class DensityMatrix {
public:
    DensityMatrix() = default;
    static DensityMatrix from(HermitianOperator op);
    static DensityMatrix uniform(const Region& region);
    static DensityMatrix pure_basis_state(const Region& region, long long index);

    const HermitianOperator& op() const { return op_; }
    const Region& region() const { return op_.region(); }
    const CMatrix& matrix() const { return op_.matrix(); }

private:
    HermitianOperator op_;
};

} // namespace qw1
