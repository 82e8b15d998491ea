#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tnle {

/// One training example: the n smallest eigenvalues (ascending) and the
/// regression target sigma^2 in squared intensity units. sigma_label keeps
/// the noise std the sample was generated at.
struct TrainingSample {
    std::vector<double> lambdas;
    double target = 0.0;
    double sigma_label = 0.0;
};

/// Affine model coefficients theta_0..theta_n, stored in raw-feature space,
/// plus the reference noise level the set was fit at.
struct CoefficientSet {
    std::vector<double> theta;
    double sigma_ref = 0.0;
};

/// Trained coefficient sets keyed by reference noise level (strictly
/// increasing sigma_ref), with an optional pooled set fit across all levels.
struct CoefficientBank {
    std::size_t window = 7;
    std::size_t n_eigs = 8;
    std::vector<CoefficientSet> entries;
    std::optional<CoefficientSet> pooled;
    std::vector<std::string> warnings;
};

/// Gradient-descent settings. alpha and epsilon apply in standardized
/// feature space when normalize is set (the default); coefficients are
/// mapped back to raw-feature space on return.
struct GdConfig {
    double alpha = 0.05;
    double epsilon = 1e-10;
    std::size_t max_iters = 200000;
    bool normalize = true;
};

enum class BankMode { Nearest, Pooled };

/// theta_0 + theta_1 l_1 + ... + theta_n l_n. lambdas length must be n.
double predict(const CoefficientSet& theta, const std::vector<double>& lambdas);

/// Half mean squared residual over the dataset.
double loss(const CoefficientSet& theta, const std::vector<TrainingSample>& data);

/// Gradient of loss, component j = mean(residual * lambda_j) with
/// lambda_0 == 1. Length n+1.
std::vector<double> gradient(const CoefficientSet& theta, const std::vector<TrainingSample>& data);

/// Fixed-step gradient descent from theta0, iterating until every descent
/// distance alpha*|dJ/dtheta_j| <= epsilon or max_iters. Raises
/// NumericError after 50 consecutive loss increases.
CoefficientSet gd_train(const std::vector<TrainingSample>& data, const GdConfig& cfg,
                        const CoefficientSet& theta0);

/// Closed-form least squares via Gaussian elimination on the normal
/// equations; NumericError "rank deficient" when the condition estimate of
/// X'X exceeds 1e12.
CoefficientSet normal_eq_solve(const std::vector<TrainingSample>& data);

/// Coarse noise-variance pilot: median of the n smallest eigenvalues.
double pilot_estimate(const std::vector<double>& lambdas);

/// Entry whose sigma_ref^2 is nearest the pilot (ties go to the smaller
/// sigma_ref); BankMode::Pooled returns the pooled set when present.
const CoefficientSet& select_coefficients(const CoefficientBank& bank, double sigma0_sq,
                                          BankMode mode = BankMode::Nearest);

} // namespace tnle
