#pragma once

#include <stdexcept>

namespace tnle {

/// Failure while reading or writing external data (images, manifests,
/// coefficient banks, CSV). The CLI maps these to exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure (eigensolver non-convergence, gradient-descent
/// divergence, rank-deficient normal equations). CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tnle
