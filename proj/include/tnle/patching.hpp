#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tnle/matrix.hpp"
#include "tnle/tensor.hpp"

namespace tnle {

enum class SelectionPolicy { All, WeakTexture };

/// Weak-texture patch selection settings. delta is the confidence level of
/// the gamma-quantile threshold, strictly inside (0,1).
struct TextureSelector {
    double delta = 0.99;
    std::size_t max_iters = 10;
    SelectionPolicy policy = SelectionPolicy::All;
};

/// Stack of vectorized sliding-window patches: data is window^2 x count x 3,
/// column t of slice j holding the j-th channel of patch t. Channel patches
/// are vectorized column-major.
struct PatchStack {
    std::size_t window = 0;
    std::size_t count = 0;
    Tensor3 data;
    std::vector<std::string> warnings;
};

/// The three per-channel patch covariance matrices (window^2 square each)
/// and the patch count that entered the estimate.
struct CovarianceSet {
    std::array<Matrix, 3> sigma;
    std::size_t s_used = 0;
};

/// Extracts every window x window x 3 sliding-window patch of a color
/// image, positions enumerated row-major from the top-left. count comes out
/// as (n1-window+1)*(n2-window+1).
PatchStack extract_patches(const Tensor3& img, std::size_t window);

/// Covariance of one slice of the stack, channel 1-based: mean-centered
/// outer products averaged with divisor 1/count.
Matrix slice_covariance(const PatchStack& ps, std::size_t channel);

/// slice_covariance applied to channels 1..3.
CovarianceSet covariance_set(const PatchStack& ps);

/// Horizontal and vertical forward-difference operators on a vectorized
/// window x window patch, kernel [-1, 1], zero rows at the far boundary.
/// Both matrices are window^2 square.
std::pair<Matrix, Matrix> gradient_operators(std::size_t window);

/// Weak-texture threshold: sigma2 times the inverse gamma CDF at delta with
/// shape N/2 and scale (2/N) tr(Dh'Dh + Dv'Dv), N = window^2.
double weak_texture_threshold(double sigma2, const TextureSelector& sel, std::size_t window);

/// Iterative weak-texture selection: keep patches whose per-channel gradient
/// covariance max eigenvalue (max over channels) falls below the threshold,
/// re-estimate sigma^2 from the kept set's n_eigs smallest block-diagonal
/// eigenvalues, and repeat until the kept set is stable or max_iters. An
/// empty selection falls back to the full stack with a warning. Policy All
/// returns the stack unchanged.
PatchStack select_weak_texture(const PatchStack& ps, const TextureSelector& sel,
                               double sigma2_init, std::size_t n_eigs = 8);

} // namespace tnle
