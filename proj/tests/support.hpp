#pragma once

// Shared helpers for the test suites. Oracles here are deliberately
// independent of the library code paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "tnle/matrix.hpp"
#include "tnle/stats.hpp"
#include "tnle/tensor.hpp"

namespace support {

inline tnle::Tensor3 random_tensor(std::mt19937_64& rng, std::size_t n1, std::size_t n2,
                                   std::size_t n3, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    tnle::Tensor3 t(n1, n2, n3);
    for (double& v : t.data()) v = dist(rng);
    return t;
}

inline tnle::Matrix random_symmetric(std::mt19937_64& rng, std::size_t n, double scale = 2.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    tnle::Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            m(i, j) = dist(rng);
            m(j, i) = m(i, j);
        }
    return m;
}

// Plain dense multiply, written independently of tnle::operator*.
inline tnle::Matrix dense_mul(const tnle::Matrix& a, const tnle::Matrix& b) {
    tnle::Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            out(i, j) = acc;
        }
    return out;
}

// Brute-force t-product: materialize circ(a) and mat_vec(b), multiply, fold.
inline tnle::Tensor3 t_product_oracle(const tnle::Tensor3& a, const tnle::Tensor3& b) {
    return tnle::fold(dense_mul(tnle::circ(a), tnle::mat_vec(b)), a.n3());
}

inline double max_abs_diff(const tnle::Tensor3& a, const tnle::Tensor3& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

// Dense materialization of a block-diagonal matrix.
inline tnle::Matrix block_diag_dense(const std::vector<tnle::Matrix>& blocks) {
    std::size_t r = 0;
    for (const auto& b : blocks) r += b.rows();
    tnle::Matrix out(r, r);
    std::size_t off = 0;
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) out(off + i, off + j) = b(i, j);
        off += b.rows();
    }
    return out;
}

// Eigenvalues of a symmetric 3x3 via the trigonometric solution of the
// characteristic polynomial, ascending.
inline std::vector<double> sym3x3_eig_oracle(const tnle::Matrix& a) {
    const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    const double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
    if (p1 == 0.0) {
        std::vector<double> v{a(0, 0), a(1, 1), a(2, 2)};
        std::sort(v.begin(), v.end());
        return v;
    }
    const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q)
                      + (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    tnle::Matrix bm(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) bm(i, j) = (a(i, j) - (i == j ? q : 0.0)) / p;
    const double detb = bm(0, 0) * (bm(1, 1) * bm(2, 2) - bm(1, 2) * bm(2, 1))
                        - bm(0, 1) * (bm(1, 0) * bm(2, 2) - bm(1, 2) * bm(2, 0))
                        + bm(0, 2) * (bm(1, 0) * bm(2, 1) - bm(1, 1) * bm(2, 0));
    const double r = std::clamp(detb / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    const double e2 = 3.0 * q - e1 - e3;
    std::vector<double> v{e1, e2, e3};
    std::sort(v.begin(), v.end());
    return v;
}

// --- synthetic images --------------------------------------------------

inline tnle::Tensor3 constant_image(std::size_t n1, std::size_t n2, double value) {
    tnle::Tensor3 t(n1, n2, 3);
    for (double& v : t.data()) v = value;
    return t;
}

// Smooth per-channel linear ramp; slopes in intensity units per pixel.
inline tnle::Tensor3 gradient_image(std::size_t n1, std::size_t n2, double base,
                                    double slope_x, double slope_y) {
    tnle::Tensor3 t(n1, n2, 3);
    for (std::size_t ch = 0; ch < 3; ++ch)
        for (std::size_t r = 0; r < n1; ++r)
            for (std::size_t c = 0; c < n2; ++c)
                t(r, c, ch) = base + 5.0 * static_cast<double>(ch)
                              + slope_x * static_cast<double>(c)
                              + slope_y * static_cast<double>(r);
    return t;
}

// Low-frequency sinusoid on top of a ramp: mildly textured but still far
// from the weak-texture threshold.
inline tnle::Tensor3 textured_image(std::size_t n1, std::size_t n2, double base,
                                    double slope, double amplitude) {
    tnle::Tensor3 t = gradient_image(n1, n2, base, slope, -0.5 * slope);
    for (std::size_t ch = 0; ch < 3; ++ch)
        for (std::size_t r = 0; r < n1; ++r)
            for (std::size_t c = 0; c < n2; ++c)
                t(r, c, ch) += amplitude
                               * std::sin(0.11 * static_cast<double>(r)
                                          + 0.07 * static_cast<double>(c)
                                          + static_cast<double>(ch));
    return t;
}

inline tnle::Tensor3 checkerboard_image(std::size_t n1, std::size_t n2, std::size_t period,
                                        double low, double high) {
    tnle::Tensor3 t(n1, n2, 3);
    for (std::size_t ch = 0; ch < 3; ++ch)
        for (std::size_t r = 0; r < n1; ++r)
            for (std::size_t c = 0; c < n2; ++c)
                t(r, c, ch) = ((r / period + c / period) % 2 == 0) ? low : high;
    return t;
}

inline tnle::Tensor3 noise_image(std::size_t n1, std::size_t n2, double sigma,
                                 std::uint64_t seed, double base = 128.0) {
    return tnle::awgn(constant_image(n1, n2, base), tnle::NoiseSpec{sigma, seed});
}

} // namespace support
