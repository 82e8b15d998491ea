#include "tnle/model.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "tnle/error.hpp"
#include "tnle/matrix.hpp"
#include "tnle/spectral.hpp"

namespace tnle {

namespace {

std::size_t feature_count(const std::vector<TrainingSample>& data) {
    if (data.empty()) throw std::invalid_argument("empty training data");
    const std::size_t n = data.front().lambdas.size();
    for (const auto& s : data)
        if (s.lambdas.size() != n) throw std::invalid_argument("inconsistent feature length");
    return n;
}

} // namespace

double predict(const CoefficientSet& theta, const std::vector<double>& lambdas) {
    if (theta.theta.size() != lambdas.size() + 1)
        throw std::invalid_argument("coefficient/feature length mismatch");
    double y = theta.theta[0];
    for (std::size_t j = 0; j < lambdas.size(); ++j) y += theta.theta[j + 1] * lambdas[j];
    return y;
}

double loss(const CoefficientSet& theta, const std::vector<TrainingSample>& data) {
    const std::size_t n = feature_count(data);
    if (theta.theta.size() != n + 1) throw std::invalid_argument("coefficient length mismatch");
    double j = 0.0;
    for (const auto& s : data) {
        const double r = predict(theta, s.lambdas) - s.target;
        j += r * r;
    }
    return j / (2.0 * static_cast<double>(data.size()));
}

std::vector<double> gradient(const CoefficientSet& theta, const std::vector<TrainingSample>& data) {
    const std::size_t n = feature_count(data);
    if (theta.theta.size() != n + 1) throw std::invalid_argument("coefficient length mismatch");
    std::vector<double> g(n + 1, 0.0);
    for (const auto& s : data) {
        const double r = predict(theta, s.lambdas) - s.target;
        g[0] += r; // lambda_0 == 1
        for (std::size_t j = 0; j < n; ++j) g[j + 1] += r * s.lambdas[j];
    }
    const double inv_m = 1.0 / static_cast<double>(data.size());
    for (double& v : g) v *= inv_m;
    return g;
}

CoefficientSet gd_train(const std::vector<TrainingSample>& data, const GdConfig& cfg,
                        const CoefficientSet& theta0) {
    const std::size_t n = feature_count(data);
    const std::size_t m = data.size();
    if (!(cfg.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (theta0.theta.size() != n + 1) throw std::invalid_argument("theta0 length mismatch");
    if (m < n + 1)
        std::cerr << "warning: training set smaller than coefficient count ("
                  << m << " < " << n + 1 << ")\n";

    // Optional feature standardization; targets stay raw.
    std::vector<double> mu(n, 0.0), sd(n, 1.0);
    std::vector<TrainingSample> work = data;
    if (cfg.normalize) {
        for (const auto& s : data)
            for (std::size_t j = 0; j < n; ++j) mu[j] += s.lambdas[j];
        for (double& v : mu) v /= static_cast<double>(m);
        std::vector<double> var(n, 0.0);
        for (const auto& s : data)
            for (std::size_t j = 0; j < n; ++j) {
                const double d = s.lambdas[j] - mu[j];
                var[j] += d * d;
            }
        for (std::size_t j = 0; j < n; ++j) {
            sd[j] = std::sqrt(var[j] / static_cast<double>(m));
            if (sd[j] == 0.0) sd[j] = 1.0; // constant feature carries no signal
        }
        for (auto& s : work)
            for (std::size_t j = 0; j < n; ++j) s.lambdas[j] = (s.lambdas[j] - mu[j]) / sd[j];
    }

    // Map the starting point into standardized space.
    CoefficientSet theta{std::vector<double>(n + 1, 0.0), theta0.sigma_ref};
    theta.theta[0] = theta0.theta[0];
    for (std::size_t j = 0; j < n; ++j) {
        theta.theta[j + 1] = theta0.theta[j + 1] * sd[j];
        theta.theta[0] += theta0.theta[j + 1] * mu[j];
    }

    double prev_loss = loss(theta, work);
    int rising = 0;
    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
        const auto g = gradient(theta, work);
        double max_step = 0.0;
        for (double v : g) {
            if (!std::isfinite(v)) throw NumericError("gd divergence: reduce alpha");
            max_step = std::max(max_step, std::abs(cfg.alpha * v));
        }
        if (max_step <= cfg.epsilon) break;

        for (std::size_t j = 0; j <= n; ++j) theta.theta[j] -= cfg.alpha * g[j];

        const double cur = loss(theta, work);
        if (cur > prev_loss || !std::isfinite(cur)) {
            if (++rising >= 50) throw NumericError("gd divergence: reduce alpha");
        } else {
            rising = 0;
        }
        prev_loss = cur;
    }

    // Back to raw-feature space.
    CoefficientSet out{std::vector<double>(n + 1, 0.0), theta0.sigma_ref};
    out.theta[0] = theta.theta[0];
    for (std::size_t j = 0; j < n; ++j) {
        out.theta[j + 1] = theta.theta[j + 1] / sd[j];
        out.theta[0] -= theta.theta[j + 1] * mu[j] / sd[j];
    }
    return out;
}

CoefficientSet normal_eq_solve(const std::vector<TrainingSample>& data) {
    const std::size_t n = feature_count(data);
    const std::size_t m = data.size();
    if (m < n + 1) throw std::invalid_argument("need at least n+1 samples");

    // Normal equations X'X theta = X'y with the implicit leading 1 column.
    const std::size_t k = n + 1;
    Matrix xtx(k, k);
    std::vector<double> xty(k, 0.0);
    for (const auto& s : data) {
        std::vector<double> row(k, 1.0);
        for (std::size_t j = 0; j < n; ++j) row[j + 1] = s.lambdas[j];
        for (std::size_t i = 0; i < k; ++i) {
            xty[i] += row[i] * s.target;
            for (std::size_t j = 0; j < k; ++j) xtx(i, j) += row[i] * row[j];
        }
    }

    const auto ev = sym_eig(xtx);
    if (ev.front() <= 0.0 || ev.back() / ev.front() > 1e12)
        throw NumericError("rank deficient");

    // Gaussian elimination with partial pivoting.
    Matrix a = xtx;
    std::vector<double> b = xty;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (a(piv, col) == 0.0) throw NumericError("rank deficient");
        if (piv != col) {
            for (std::size_t c = 0; c < k; ++c) std::swap(a(col, c), a(piv, c));
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < k; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (std::size_t c = col; c < k; ++c) a(r, c) -= f * a(col, c);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> theta(k, 0.0);
    for (std::size_t i = k; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < k; ++j) s -= a(i, j) * theta[j];
        theta[i] = s / a(i, i);
    }
    return CoefficientSet{std::move(theta), 0.0};
}

double pilot_estimate(const std::vector<double>& lambdas) {
    if (lambdas.empty()) throw std::invalid_argument("empty eigenvalue list");
    std::vector<double> v = lambdas;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

const CoefficientSet& select_coefficients(const CoefficientBank& bank, double sigma0_sq,
                                          BankMode mode) {
    if (mode == BankMode::Pooled) {
        if (!bank.pooled) throw std::invalid_argument("bank has no pooled coefficients");
        return *bank.pooled;
    }
    if (bank.entries.empty()) throw std::invalid_argument("empty coefficient bank");
    const CoefficientSet* best = &bank.entries.front();
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& e : bank.entries) {
        const double d = std::abs(e.sigma_ref * e.sigma_ref - sigma0_sq);
        if (d < best_dist) { // strict: ties keep the smaller sigma_ref seen first
            best_dist = d;
            best = &e;
        }
    }
    return *best;
}

} // namespace tnle
