#pragma once

#include <stdexcept>
#include <string>

namespace qw1 {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two operands live on regions that were required to be disjoint.
struct RegionOverlap : Error {
    using Error::Error;
};

// A site/region argument is not compatible with the operand's region.
struct RegionMismatch : Error {
    using Error::Error;
};

// Requested Hilbert-space dimension (or classical support) exceeds the cap.
struct SizeCap : Error {
    using Error::Error;
};

// w1_norm input has nonzero trace.
struct NotTraceless : Error {
    using Error::Error;
};

// matrix_log_pd input has an eigenvalue at or below the positivity floor.
struct NonPositiveDefinite : Error {
    using Error::Error;
};

// A constructed value violates one of its type invariants.
struct InvariantViolation : Error {
    using Error::Error;
};

// Marginal family members do not agree under partial trace.
struct InconsistentMarginals : Error {
    using Error::Error;
};

// A state required to be an explicit product of single-site factors is not.
struct NotProduct : Error {
    using Error::Error;
};

// A state required to have full support is rank deficient.
struct NotFullRank : Error {
    using Error::Error;
};

// Malformed JSON input.
struct ParseError : Error {
    using Error::Error;
};

} // namespace qw1
