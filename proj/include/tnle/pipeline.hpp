#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tnle/model.hpp"
#include "tnle/patching.hpp"
#include "tnle/stats.hpp"
#include "tnle/tensor.hpp"

namespace tnle {

/// End-to-end estimation settings: window size, eigenvalue count, patch
/// selection policy, and how coefficients are picked from the bank.
struct EstimationParams {
    std::size_t window = 7;
    std::size_t n_eigs = 8;
    TextureSelector selection;
    BankMode mode = BankMode::Nearest;
};

/// Full provenance of one estimate.
struct EstimationReport {
    double sigma_hat = 0.0;
    double sigma_hat_sq = 0.0;
    std::vector<double> lambdas;
    double pilot = 0.0;
    double selected_ref = 0.0;
    std::size_t s_used = 0;
    std::vector<std::string> warnings;
};

/// Eigenvalue features of one image plus bookkeeping.
struct Features {
    std::vector<double> lambdas;
    std::size_t s_used = 0;
    std::vector<std::string> warnings;
};

/// One benchmark result line; abs_error = |sigma_hat - sigma_true|.
struct ResultRow {
    std::string image_id;
    double sigma_true = 0.0;
    std::string method;
    double sigma_hat = 0.0;
    double abs_error = 0.0;
    std::size_t s_used = 0;
    std::size_t n_eigs = 0;
    std::size_t window = 0;
    std::uint64_t seed = 0;
};

/// Per-(noise level, method) accuracy summary.
struct MetricRow {
    double sigma_true = 0.0;
    std::string method;
    MetricReport report;
};

struct BenchmarkResult {
    std::vector<ResultRow> rows;
    std::vector<MetricRow> metrics;
};

/// Method names used in result rows.
inline constexpr const char* kMethodProposed = "tnle";
inline constexpr const char* kMethodBaseline = "min-eig";

/// Patch extraction, optional weak-texture selection, per-channel
/// covariances, block-diagonal spectrum, n smallest eigenvalues.
Features image_features(const Tensor3& img, const EstimationParams& params);

/// Features -> pilot -> coefficient selection -> prediction;
/// sigma_hat = sqrt(max(0, sigma_hat_sq)).
EstimationReport estimate_noise(const Tensor3& img, const CoefficientBank& bank,
                                const EstimationParams& params);

/// Trains one coefficient set per noise level: injects AWGN into each
/// training image with a per-(image, level) derived seed, computes features,
/// and runs gradient descent on targets sigma^2. fit_pooled additionally
/// fits one set over the union of all levels.
CoefficientBank train_bank(const std::vector<Tensor3>& train_images,
                           const std::vector<double>& sigmas,
                           const EstimationParams& params, const GdConfig& cfg,
                           std::uint64_t seed, bool fit_pooled = false);

/// Minimum-eigenvalue baseline: per channel the smallest covariance
/// eigenvalue, averaged over channels, square-rooted.
double baseline_min_eig(const Tensor3& img, std::size_t window);

/// Runs both methods over every (image, sigma) pair with shared noisy
/// realizations, then summarizes per-level metrics for each method. Rows
/// are ordered by (image index, sigma index) regardless of parallelism.
BenchmarkResult benchmark(const std::vector<Tensor3>& eval_images,
                          const std::vector<double>& sigmas,
                          const CoefficientBank& bank, const EstimationParams& params,
                          std::uint64_t seed,
                          const std::vector<std::string>& image_ids = {});

/// Noise seed for benchmark/training case (image i, sigma index j):
/// splitmix64_at(splitmix64_at(base, i), j).
std::uint64_t derive_case_seed(std::uint64_t base, std::size_t image_index,
                               std::size_t sigma_index);

/// Worker cap from TNLE_THREADS (unset or 0 = hardware concurrency).
std::size_t worker_count();

} // namespace tnle
