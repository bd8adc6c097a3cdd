#pragma once

#include <stdexcept>
#include <string>

namespace eqvar {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CyclicGraph : Error {
    using Error::Error;
};

struct NonZeroDiagonal : Error {
    using Error::Error;
};

struct LengthMismatch : Error {
    using Error::Error;
};

struct SizeMismatch : Error {
    using Error::Error;
};

struct NonPositiveScale : Error {
    using Error::Error;
};

struct TooFewRows : Error {
    using Error::Error;
};

/// Raised when a conditioning submatrix cannot be Cholesky-factored, even
/// after the documented jitter retry. In ordering runs this is the p > n
/// stopping signal.
struct SingularConditioningSet : Error {
    using Error::Error;
};

struct CombinatorialBlowup : Error {
    using Error::Error;
};

struct NoConvergence : Error {
    using Error::Error;
};

struct AllTied : Error {
    using Error::Error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

}  // namespace eqvar
