#include "tnle/patching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tnle/spectral.hpp"
#include "tnle/stats.hpp"

namespace tnle {

PatchStack extract_patches(const Tensor3& img, std::size_t window) {
    if (img.n3() != 3) throw std::invalid_argument("patch extraction needs a 3-channel image");
    if (window < 2) throw std::invalid_argument("window must be at least 2");
    if (window > img.n1() || window > img.n2()) throw std::invalid_argument("window too large");

    const std::size_t rows = img.n1() - window + 1;
    const std::size_t cols = img.n2() - window + 1;
    const std::size_t s = rows * cols;
    const std::size_t n = window * window;

    Tensor3 data(n, s, 3);
    for (std::size_t ch = 0; ch < 3; ++ch) {
        for (std::size_t wr = 0; wr < rows; ++wr) {
            for (std::size_t wc = 0; wc < cols; ++wc) {
                const std::size_t t = wr * cols + wc;
                // column-major vectorization of the window
                for (std::size_t pc = 0; pc < window; ++pc)
                    for (std::size_t pr = 0; pr < window; ++pr)
                        data(pc * window + pr, t, ch) = img(wr + pr, wc + pc, ch);
            }
        }
    }
    return PatchStack{window, s, std::move(data), {}};
}

Matrix slice_covariance(const PatchStack& ps, std::size_t channel) {
    if (channel < 1 || channel > 3) throw std::invalid_argument("channel out of range");
    const Tensor3& d = ps.data;
    const std::size_t n = d.n1();
    const std::size_t s = d.n2();
    if (s < 2) throw std::invalid_argument("insufficient patches");
    const std::size_t ch = channel - 1;

    std::vector<double> mean(n, 0.0);
    for (std::size_t t = 0; t < s; ++t)
        for (std::size_t i = 0; i < n; ++i) mean[i] += d(i, t, ch);
    for (double& m : mean) m /= static_cast<double>(s);

    Matrix cov(n, n);
    std::vector<double> centered(n);
    for (std::size_t t = 0; t < s; ++t) {
        for (std::size_t i = 0; i < n; ++i) centered[i] = d(i, t, ch) - mean[i];
        for (std::size_t i = 0; i < n; ++i) {
            const double ci = centered[i];
            for (std::size_t j = i; j < n; ++j) cov(i, j) += ci * centered[j];
        }
    }
    const double inv_s = 1.0 / static_cast<double>(s);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            cov(i, j) *= inv_s;
            cov(j, i) = cov(i, j);
        }
    }
    return cov;
}

CovarianceSet covariance_set(const PatchStack& ps) {
    return CovarianceSet{{slice_covariance(ps, 1), slice_covariance(ps, 2),
                          slice_covariance(ps, 3)},
                         ps.data.n2()};
}

std::pair<Matrix, Matrix> gradient_operators(std::size_t window) {
    if (window < 2) throw std::invalid_argument("window must be at least 2");
    const std::size_t n = window * window;
    const auto idx = [window](std::size_t r, std::size_t c) { return c * window + r; };

    Matrix dh(n, n), dv(n, n);
    for (std::size_t r = 0; r < window; ++r) {
        for (std::size_t c = 0; c < window; ++c) {
            if (c + 1 < window) {
                dh(idx(r, c), idx(r, c)) = -1.0;
                dh(idx(r, c), idx(r, c + 1)) = 1.0;
            }
            if (r + 1 < window) {
                dv(idx(r, c), idx(r, c)) = -1.0;
                dv(idx(r, c), idx(r + 1, c)) = 1.0;
            }
        }
    }
    return {std::move(dh), std::move(dv)};
}

double weak_texture_threshold(double sigma2, const TextureSelector& sel, std::size_t window) {
    if (!(sel.delta > 0.0 && sel.delta < 1.0)) throw std::invalid_argument("delta must be inside (0,1)");
    if (sigma2 < 0.0) throw std::invalid_argument("sigma2 must be non-negative");
    if (sigma2 == 0.0) return 0.0;

    const double n = static_cast<double>(window * window);
    const auto [dh, dv] = gradient_operators(window);
    const double tr = trace(transpose(dh) * dh + transpose(dv) * dv);
    return sigma2 * gamma_cdf_inv(sel.delta, n / 2.0, (2.0 / n) * tr);
}

namespace {

// Max eigenvalue of the 2x2 gradient Gram matrix [[hh, hv], [hv, vv]].
double max_eig_2x2(double hh, double hv, double vv) {
    const double half_tr = 0.5 * (hh + vv);
    const double disc = std::sqrt(0.25 * (hh - vv) * (hh - vv) + hv * hv);
    return half_tr + disc;
}

// Texture strength of one patch: per channel the max eigenvalue of the
// gradient covariance [Dh y, Dv y]' [Dh y, Dv y], maximized over channels.
// Forward differences are taken directly on the vectorized patch, which is
// exactly the gradient_operators action.
double patch_strength(const Tensor3& d, std::size_t t, std::size_t window) {
    const auto idx = [window](std::size_t r, std::size_t c) { return c * window + r; };
    double strength = 0.0;
    for (std::size_t ch = 0; ch < 3; ++ch) {
        double hh = 0.0, hv = 0.0, vv = 0.0;
        for (std::size_t r = 0; r < window; ++r) {
            for (std::size_t c = 0; c < window; ++c) {
                const double gh = c + 1 < window
                                      ? d(idx(r, c + 1), t, ch) - d(idx(r, c), t, ch)
                                      : 0.0;
                const double gv = r + 1 < window
                                      ? d(idx(r + 1, c), t, ch) - d(idx(r, c), t, ch)
                                      : 0.0;
                hh += gh * gh;
                hv += gh * gv;
                vv += gv * gv;
            }
        }
        strength = std::max(strength, max_eig_2x2(hh, hv, vv));
    }
    return strength;
}

PatchStack subset_stack(const PatchStack& ps, const std::vector<std::size_t>& kept) {
    const Tensor3& d = ps.data;
    Tensor3 data(d.n1(), kept.size(), 3);
    for (std::size_t ch = 0; ch < 3; ++ch)
        for (std::size_t k = 0; k < kept.size(); ++k)
            for (std::size_t i = 0; i < d.n1(); ++i) data(i, k, ch) = d(i, kept[k], ch);
    return PatchStack{ps.window, kept.size(), std::move(data), ps.warnings};
}

} // namespace

PatchStack select_weak_texture(const PatchStack& ps, const TextureSelector& sel,
                               double sigma2_init, std::size_t n_eigs) {
    if (sel.policy == SelectionPolicy::All) return ps;
    if (sigma2_init < 0.0) throw std::invalid_argument("sigma2_init must be non-negative");
    if (!(sel.delta > 0.0 && sel.delta < 1.0)) throw std::invalid_argument("delta must be inside (0,1)");

    const std::size_t s = ps.data.n2();
    std::vector<double> strength(s);
    for (std::size_t t = 0; t < s; ++t) strength[t] = patch_strength(ps.data, t, ps.window);

    std::vector<std::size_t> kept(s);
    std::iota(kept.begin(), kept.end(), std::size_t{0});
    double sigma2 = sigma2_init;

    for (std::size_t iter = 0; iter < sel.max_iters; ++iter) {
        const double tau = weak_texture_threshold(sigma2, sel, ps.window);
        std::vector<std::size_t> next;
        for (std::size_t t = 0; t < s; ++t)
            if (strength[t] < tau) next.push_back(t);

        if (next.size() < 2) {
            PatchStack full = ps;
            full.warnings.push_back("weak-texture selection empty; using all patches");
            return full;
        }
        if (next == kept) break;
        kept = std::move(next);

        const auto cs = covariance_set(subset_stack(ps, kept));
        const auto lam = n_smallest(bdiag_spectrum(cs), n_eigs);
        sigma2 = std::accumulate(lam.begin(), lam.end(), 0.0) / static_cast<double>(lam.size());
    }
    return subset_stack(ps, kept);
}

} // namespace tnle
