#include "tnle/stats.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tnle/error.hpp"

namespace tnle {

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double gaussian_at(std::uint64_t seed, std::uint64_t index) {
    // Box-Muller over two splitmix64 words. u1 lands in (0,1] so the log is
    // always finite; u2 in [0,1).
    const double u1 = (static_cast<double>(splitmix64_at(seed, 2 * index) >> 11) + 1.0)
                      * 0x1.0p-53;
    const double u2 = static_cast<double>(splitmix64_at(seed, 2 * index + 1) >> 11)
                      * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Tensor3 awgn(const Tensor3& img, const NoiseSpec& spec) {
    if (spec.sigma < 0.0) throw std::invalid_argument("sigma must be non-negative");
    if (spec.sigma == 0.0) return img;
    Tensor3 out = img;
    auto& d = out.data();
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] += spec.sigma * gaussian_at(spec.seed, i);
    return out;
}

namespace {

// Regularized lower incomplete gamma P(a, x), series branch (x < a+1).
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw NumericError("incomplete gamma series did not converge");
}

// Regularized upper incomplete gamma Q(a, x) via Lentz continued fraction
// (x >= a+1).
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw NumericError("incomplete gamma continued fraction did not converge");
}

double gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_log_pdf(double a, double x) {
    return (a - 1.0) * std::log(x) - x - std::lgamma(a);
}

} // namespace

double gamma_cdf(double x, double shape, double scale) {
    if (shape <= 0.0 || scale <= 0.0) throw std::invalid_argument("gamma parameters must be positive");
    return gamma_p(shape, x / scale);
}

double gamma_cdf_inv(double p, double shape, double scale) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must be inside (0,1)");
    if (shape <= 0.0 || scale <= 0.0) throw std::invalid_argument("gamma parameters must be positive");

    // Bracket the unit-scale root, then safeguarded Newton on P(a,x) - p.
    double lo = 0.0;
    double hi = shape + 1.0;
    while (gamma_p(shape, hi) < p) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw NumericError("gamma_cdf_inv bracket failure");
    }

    double x = shape; // unit-scale mean as the starting point
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = gamma_p(shape, x) - p;
        if (std::abs(f) <= 1e-10) return x * scale;
        if (f > 0.0) hi = x; else lo = x;
        const double pdf = std::exp(gamma_log_pdf(shape, x));
        double next = pdf > 0.0 ? x - f / pdf : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    throw NumericError("gamma_cdf_inv did not converge");
}

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

} // namespace

double rmse_spread(const std::vector<double>& estimates) {
    if (estimates.empty()) throw std::invalid_argument("empty estimate list");
    const double m = mean_of(estimates);
    double s = 0.0;
    for (double x : estimates) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(estimates.size()));
}

double rmse_truth(const std::vector<double>& estimates, double truth) {
    if (estimates.empty()) throw std::invalid_argument("empty estimate list");
    double s = 0.0;
    for (double x : estimates) s += (x - truth) * (x - truth);
    return std::sqrt(s / static_cast<double>(estimates.size()));
}

double mae(const std::vector<double>& estimates) {
    if (estimates.empty()) throw std::invalid_argument("empty estimate list");
    const double m = mean_of(estimates);
    double s = 0.0;
    for (double x : estimates) s += std::abs(x - m);
    return s / static_cast<double>(estimates.size());
}

double mae_truth(const std::vector<double>& estimates, double truth) {
    if (estimates.empty()) throw std::invalid_argument("empty estimate list");
    double s = 0.0;
    for (double x : estimates) s += std::abs(x - truth);
    return s / static_cast<double>(estimates.size());
}

} // namespace tnle
