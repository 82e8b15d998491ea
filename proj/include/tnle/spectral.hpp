#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "tnle/matrix.hpp"
#include "tnle/patching.hpp"

namespace tnle {

/// Sorted eigenvalues of the block-diagonal covariance matrix. r is the
/// total count (3 * window^2 for a full CovarianceSet); s_used carries the
/// patch count forward from the covariance stage.
struct Spectrum {
    std::vector<double> values;
    std::size_t r = 0;
    std::size_t s_used = 0;
};

/// Eigenvalues of a symmetric matrix, ascending. Cyclic Jacobi on the
/// symmetrized (A+A')/2, iterated until the off-diagonal Frobenius norm
/// drops below 1e-11 * ||A||_F, at most 100 sweeps (NumericError past
/// that). Input must be symmetric to 1e-8 relative and of order <= 256.
std::vector<double> sym_eig(const Matrix& a);

/// Sorted union (with multiplicity) of the three per-channel covariance
/// spectra. Negative values within -1e-9 of the largest eigenvalue are
/// clamped to zero; anything more negative raises NumericError.
Spectrum bdiag_spectrum(const CovarianceSet& cs);

/// First n values of the sorted spectrum.
std::vector<double> n_smallest(const Spectrum& sp, std::size_t n);

/// The (lo, hi) band sigma^2 -+ sqrt(2r) sigma^2 / sqrt(s-1) that contains
/// convex combinations of the smallest block-diagonal eigenvalues of a
/// pure-noise covariance stack.
std::pair<double, double> noise_eigenvalue_band(double sigma, std::size_t r, std::size_t s);

} // namespace tnle
