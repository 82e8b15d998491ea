#pragma once

#include <cstdint>
#include <vector>

#include "tnle/tensor.hpp"

namespace tnle {

/// Additive white Gaussian noise: std in 8-bit intensity units plus the
/// seed of the deterministic generator.
struct NoiseSpec {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Accuracy summary for a batch of estimates. rmse_spread and mae measure
/// spread around the estimate mean; rmse_truth is referenced to the known
/// noise level.
struct MetricReport {
    double rmse_spread = 0.0;
    double rmse_truth = 0.0;
    double mae = 0.0;
    std::size_t n_samples = 0;
};

/// Stateless counter RNG: splitmix64 output at the given stream index.
/// Identical (seed, index) always yields the same word, so parallel
/// generation stays deterministic.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index);

/// Standard normal sample at stream index, via Box-Muller over two
/// splitmix64 words (indices 2k and 2k+1).
double gaussian_at(std::uint64_t seed, std::uint64_t index);

/// Adds i.i.d. N(0, sigma^2) noise to every element. No clipping or
/// re-quantization: outputs stay in floating point. sigma = 0 returns the
/// input bit-exactly.
Tensor3 awgn(const Tensor3& img, const NoiseSpec& spec);

/// Regularized lower incomplete gamma P(shape, x/scale): the gamma CDF.
double gamma_cdf(double x, double shape, double scale);

/// Inverse gamma CDF: the x with gamma_cdf(x, shape, scale) = p, solved
/// by bracketed Newton iteration to |P - p| <= 1e-10.
double gamma_cdf_inv(double p, double shape, double scale);

/// sqrt(sum((v_i - mean)^2) / N), spread around the sample mean.
double rmse_spread(const std::vector<double>& estimates);

/// sqrt(sum((v_i - truth)^2) / N).
double rmse_truth(const std::vector<double>& estimates, double truth);

/// sum(|v_i - mean|) / N, spread around the sample mean.
double mae(const std::vector<double>& estimates);

/// sum(|v_i - truth|) / N.
double mae_truth(const std::vector<double>& estimates, double truth);

} // namespace tnle
