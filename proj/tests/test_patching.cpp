#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "support.hpp"
#include "tnle/patching.hpp"
#include "tnle/spectral.hpp"
#include "tnle/stats.hpp"

using namespace tnle;

TEST_CASE("extract_patches counts and window errors") {
    const Tensor3 img = support::constant_image(10, 10, 3.0);
    const PatchStack ps = extract_patches(img, 7);
    CHECK(ps.count == 16);
    CHECK(ps.data.n1() == 49);
    CHECK(ps.data.n2() == 16);
    CHECK(ps.data.n3() == 3);

    CHECK_THROWS_WITH_AS(extract_patches(support::constant_image(5, 5, 0.0), 7),
                         doctest::Contains("window too large"), std::invalid_argument);
    CHECK_THROWS_AS(extract_patches(img, 1), std::invalid_argument);
}

TEST_CASE("extract_patches of a constant image is constant") {
    const PatchStack ps = extract_patches(support::constant_image(9, 8, 4.25), 3);
    for (double v : ps.data.data()) CHECK(v == 4.25);
}

TEST_CASE("extract_patches vectorizes windows column-major") {
    // 8x8 ramp, M1=7: 4 window positions; column 1 is the top-left block.
    Tensor3 img(8, 8, 3);
    for (std::size_t ch = 0; ch < 3; ++ch)
        for (std::size_t r = 0; r < 8; ++r)
            for (std::size_t c = 0; c < 8; ++c)
                img(r, c, ch) = static_cast<double>(100 * ch) + static_cast<double>(r * 8 + c);

    const PatchStack ps = extract_patches(img, 7);
    REQUIRE(ps.count == 4);
    for (std::size_t ch = 0; ch < 3; ++ch)
        for (std::size_t pc = 0; pc < 7; ++pc)
            for (std::size_t pr = 0; pr < 7; ++pr)
                CHECK(ps.data(pc * 7 + pr, 0, ch) == img(pr, pc, ch));
    // position order is row-major over window origins
    CHECK(ps.data(0, 1, 0) == img(0, 1, 0));
    CHECK(ps.data(0, 2, 0) == img(1, 0, 0));
    CHECK(ps.data(0, 3, 0) == img(1, 1, 0));
}

TEST_CASE("patch count matches the closed form for random shapes") {
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<std::size_t> sz(4, 24), win(2, 4);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n1 = sz(rng), n2 = sz(rng), w = win(rng);
        const PatchStack ps = extract_patches(support::constant_image(n1, n2, 1.0), w);
        CHECK(ps.count == (n1 - w + 1) * (n2 - w + 1));
    }
}

TEST_CASE("slice_covariance hand cases") {
    const PatchStack constant = extract_patches(support::constant_image(6, 6, 9.0), 3);
    CHECK(slice_covariance(constant, 1) == Matrix(9, 9));

    // two columns (0,0)' and (2,0)' -> [[1,0],[0,0]] with divisor s
    PatchStack tiny;
    tiny.window = 0;
    tiny.count = 2;
    tiny.data = Tensor3(2, 2, 3);
    tiny.data(0, 1, 0) = 2.0;
    const Matrix cov = slice_covariance(tiny, 1);
    CHECK(cov(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cov(0, 1) == 0.0);
    CHECK(cov(1, 0) == 0.0);
    CHECK(cov(1, 1) == 0.0);

    PatchStack single;
    single.data = Tensor3(2, 1, 3);
    CHECK_THROWS_WITH_AS(slice_covariance(single, 1), doctest::Contains("insufficient patches"),
                         std::invalid_argument);
    CHECK_THROWS_AS(slice_covariance(tiny, 0), std::invalid_argument);
    CHECK_THROWS_AS(slice_covariance(tiny, 4), std::invalid_argument);
}

TEST_CASE("slice_covariance of pure noise concentrates at sigma^2") {
    const Tensor3 img = support::noise_image(110, 110, 10.0, 77);
    const PatchStack ps = extract_patches(img, 7);
    REQUIRE(ps.count >= 10000);
    const Matrix cov = slice_covariance(ps, 2);
    double mean_diag = 0.0;
    for (std::size_t i = 0; i < cov.rows(); ++i) mean_diag += cov(i, i);
    mean_diag /= static_cast<double>(cov.rows());
    CHECK(mean_diag == doctest::Approx(100.0).epsilon(0.03));
}

TEST_CASE("covariance_set composes slice_covariance per channel") {
    std::mt19937_64 rng(42);
    const Tensor3 img = support::random_tensor(rng, 8, 9, 3, 0.0, 40.0);
    const PatchStack ps = extract_patches(img, 4);
    const CovarianceSet cs = covariance_set(ps);
    CHECK(cs.s_used == ps.count);
    for (std::size_t j = 1; j <= 3; ++j) CHECK(cs.sigma[j - 1] == slice_covariance(ps, j));
}

TEST_CASE("covariance_set follows channel permutations") {
    std::mt19937_64 rng(43);
    const Tensor3 img = support::random_tensor(rng, 8, 8, 3, 0.0, 30.0);
    Tensor3 perm(8, 8, 3);
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 8; ++c) {
            perm(r, c, 0) = img(r, c, 1);
            perm(r, c, 1) = img(r, c, 2);
            perm(r, c, 2) = img(r, c, 0);
        }
    const CovarianceSet a = covariance_set(extract_patches(img, 3));
    const CovarianceSet b = covariance_set(extract_patches(perm, 3));
    CHECK(b.sigma[0] == a.sigma[1]);
    CHECK(b.sigma[1] == a.sigma[2]);
    CHECK(b.sigma[2] == a.sigma[0]);
}

TEST_CASE("covariances are symmetric, PSD, translation-invariant, quadratic in scale") {
    std::mt19937_64 rng(44);
    const Tensor3 img = support::random_tensor(rng, 12, 12, 3, 0.0, 80.0);
    const CovarianceSet cs = covariance_set(extract_patches(img, 5));

    for (const auto& cov : cs.sigma) {
        CHECK(max_abs_diff(cov, transpose(cov)) <= 1e-12);
        const auto ev = sym_eig(cov);
        CHECK(ev.front() >= -1e-9 * trace(cov));
    }

    Tensor3 shifted = img;
    for (double& v : shifted.data()) v += 17.5;
    const CovarianceSet cs_shift = covariance_set(extract_patches(shifted, 5));
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(max_abs_diff(cs.sigma[j], cs_shift.sigma[j]) <= 1e-10);

    Tensor3 scaled = img;
    for (double& v : scaled.data()) v *= 3.0;
    const CovarianceSet cs_scaled = covariance_set(extract_patches(scaled, 5));
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < cs.sigma[j].data().size(); ++i) {
            const double want = 9.0 * cs.sigma[j].data()[i];
            CHECK(cs_scaled.sigma[j].data()[i]
                  == doctest::Approx(want).epsilon(1e-10).scale(std::abs(want) + 1.0));
        }
}

TEST_CASE("gradient_operators act as forward differences") {
    const auto [dh, dv] = gradient_operators(2);
    // patch [[a,b],[c,d]] vectorized column-major: (a, c, b, d)
    const Matrix patch(4, 1, {1.0, 5.0, 2.0, 9.0});
    const Matrix gh = dh * patch;
    const Matrix gv = dv * patch;
    CHECK(gh(0, 0) == 1.0);  // b - a
    CHECK(gh(1, 0) == 4.0);  // d - c
    CHECK(gh(2, 0) == 0.0);
    CHECK(gh(3, 0) == 0.0);
    CHECK(gv(0, 0) == 4.0);  // c - a
    CHECK(gv(2, 0) == 7.0);  // d - b
    CHECK(gv(1, 0) == 0.0);
    CHECK(gv(3, 0) == 0.0);

    // constant patch maps to zero
    const auto [dh7, dv7] = gradient_operators(7);
    const Matrix ones(49, 1, std::vector<double>(49, 3.0));
    const Matrix gh7 = dh7 * ones;
    const Matrix gv7 = dv7 * ones;
    for (double v : gh7.data()) CHECK(v == 0.0);
    for (double v : gv7.data()) CHECK(v == 0.0);

    // frozen trace constant for the default window
    CHECK(trace(transpose(dh7) * dh7 + transpose(dv7) * dv7) == doctest::Approx(168.0));
}

TEST_CASE("weak_texture_threshold") {
    TextureSelector sel;
    sel.delta = 0.99;
    CHECK(weak_texture_threshold(0.0, sel, 7) == 0.0);

    // strictly increasing in delta
    double prev = 0.0;
    for (double d : {0.05, 0.2, 0.5, 0.8, 0.99}) {
        TextureSelector s2 = sel;
        s2.delta = d;
        const double tau = weak_texture_threshold(100.0, s2, 7);
        CHECK(tau > prev);
        prev = tau;
    }

    // matches the gamma quantile with the frozen trace constant
    const double tau = weak_texture_threshold(100.0, sel, 7);
    const double expect = 100.0 * gamma_cdf_inv(0.99, 24.5, (2.0 / 49.0) * 168.0);
    CHECK(tau == doctest::Approx(expect).epsilon(1e-12));
    CHECK(gamma_cdf(tau / 100.0, 24.5, (2.0 / 49.0) * 168.0) == doctest::Approx(0.99).epsilon(1e-8));

    TextureSelector bad = sel;
    bad.delta = 1.0;
    CHECK_THROWS_AS(weak_texture_threshold(1.0, bad, 7), std::invalid_argument);
}

TEST_CASE("select_weak_texture with policy All is the identity") {
    const Tensor3 img = support::noise_image(20, 20, 5.0, 5);
    const PatchStack ps = extract_patches(img, 7);
    TextureSelector sel; // policy All
    const PatchStack out = select_weak_texture(ps, sel, 25.0);
    CHECK(out.data == ps.data);
}

TEST_CASE("select_weak_texture keeps most pure-noise patches") {
    const double sigma = 10.0;
    const Tensor3 img = support::noise_image(64, 64, sigma, 99);
    const PatchStack ps = extract_patches(img, 7);
    TextureSelector sel;
    sel.policy = SelectionPolicy::WeakTexture;
    sel.delta = 0.99;
    const PatchStack kept = select_weak_texture(ps, sel, sigma * sigma);
    CHECK(kept.warnings.empty());
    CHECK(kept.count >= (ps.count * 9) / 10);
}

TEST_CASE("select_weak_texture culls strong texture") {
    // flat left half, strong checkerboard right half
    const double sigma = 10.0;
    Tensor3 clean = support::checkerboard_image(64, 64, 8, 78.0, 178.0);
    for (std::size_t ch = 0; ch < 3; ++ch)
        for (std::size_t r = 0; r < 64; ++r)
            for (std::size_t c = 0; c < 32; ++c) clean(r, c, ch) = 128.0;
    const Tensor3 board = awgn(clean, NoiseSpec{sigma, 100});
    const Tensor3 flat = support::noise_image(64, 64, sigma, 100);
    TextureSelector sel;
    sel.policy = SelectionPolicy::WeakTexture;
    const PatchStack kept_board =
        select_weak_texture(extract_patches(board, 7), sel, sigma * sigma);
    const PatchStack kept_flat =
        select_weak_texture(extract_patches(flat, 7), sel, sigma * sigma);
    CHECK(kept_board.warnings.empty());
    CHECK(kept_board.count < kept_flat.count);
    CHECK(kept_board.count >= 2);
}

TEST_CASE("select_weak_texture raising delta never shrinks the kept set") {
    const Tensor3 img = awgn(support::checkerboard_image(40, 40, 8, 100.0, 160.0),
                             NoiseSpec{8.0, 55});
    const PatchStack ps = extract_patches(img, 7);
    TextureSelector lo, hi;
    lo.policy = hi.policy = SelectionPolicy::WeakTexture;
    lo.max_iters = hi.max_iters = 1; // isolate the threshold monotonicity
    lo.delta = 0.90;
    hi.delta = 0.99;
    const PatchStack kept_lo = select_weak_texture(ps, lo, 64.0);
    const PatchStack kept_hi = select_weak_texture(ps, hi, 64.0);
    CHECK(kept_lo.count <= kept_hi.count);
}

TEST_CASE("select_weak_texture falls back to the full stack when nothing passes") {
    // period-2 checkerboard with a huge step: no flat window anywhere
    const Tensor3 img = awgn(support::checkerboard_image(24, 24, 2, 0.0, 255.0),
                             NoiseSpec{2.0, 9});
    const PatchStack ps = extract_patches(img, 7);
    TextureSelector sel;
    sel.policy = SelectionPolicy::WeakTexture;
    sel.delta = 0.5;
    const PatchStack out = select_weak_texture(ps, sel, 4.0);
    CHECK(out.count == ps.count);
    REQUIRE(!out.warnings.empty());
    CHECK(out.warnings.front().find("selection empty") != std::string::npos);
}
