#include "tnle/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "tnle/error.hpp"

namespace tnle {

namespace {

double frobenius(const Matrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

double off_diag_frobenius(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

} // namespace

std::vector<double> sym_eig(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("sym_eig needs a square matrix");
    const std::size_t n = a.rows();
    if (n == 0) throw std::invalid_argument("sym_eig on empty matrix");
    if (n > 256) throw std::invalid_argument("sym_eig order limit exceeded");

    double max_entry = 0.0, max_asym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            max_entry = std::max(max_entry, std::abs(a(i, j)));
            max_asym = std::max(max_asym, std::abs(a(i, j) - a(j, i)));
        }
    }
    if (max_asym > 1e-8 * std::max(max_entry, 1e-300))
        throw std::invalid_argument("sym_eig input not symmetric");

    // Work on the symmetrized matrix.
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = 0.5 * (a(i, j) + a(j, i));

    const double norm = frobenius(m);
    const double tol = 1e-11 * norm;

    bool converged = off_diag_frobenius(m) <= tol;
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0)
                                 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = m(p, p), aqq = m(q, q);
                m(p, p) = app - t * apq;
                m(q, q) = aqq + t * apq;
                m(p, q) = 0.0;
                m(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = m(r, p), arq = m(r, q);
                    m(r, p) = arp - s * (arq + tau * arp);
                    m(p, r) = m(r, p);
                    m(r, q) = arq + s * (arp - tau * arq);
                    m(q, r) = m(r, q);
                }
            }
        }
        converged = off_diag_frobenius(m) <= tol;
    }
    if (!converged) throw NumericError("eig non-convergence");

    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = m(i, i);
    std::sort(values.begin(), values.end());
    return values;
}

Spectrum bdiag_spectrum(const CovarianceSet& cs) {
    // Block order (sigma3, sigma1, sigma2), matching the unfold(B * I2)
    // construction; the sorted union is order-free anyway.
    std::vector<double> values;
    for (std::size_t j : {2u, 0u, 1u}) {
        auto ev = sym_eig(cs.sigma[j]);
        values.insert(values.end(), ev.begin(), ev.end());
    }
    std::sort(values.begin(), values.end());

    const double maxv = values.empty() ? 0.0 : values.back();
    const double floor = -1e-9 * std::max(maxv, 0.0);
    for (double& v : values) {
        if (v < 0.0) {
            if (v < floor) throw NumericError("negative eigenvalue beyond tolerance");
            v = 0.0;
        }
    }
    return Spectrum{std::move(values), cs.sigma[0].rows() * 3, cs.s_used};
}

std::vector<double> n_smallest(const Spectrum& sp, std::size_t n) {
    if (n < 1 || n > sp.values.size()) throw std::invalid_argument("n out of range");
    return {sp.values.begin(), sp.values.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::pair<double, double> noise_eigenvalue_band(double sigma, std::size_t r, std::size_t s) {
    if (s < 2) throw std::invalid_argument("band needs s >= 2");
    if (r < 1) throw std::invalid_argument("band needs r >= 1");
    if (sigma < 0.0) throw std::invalid_argument("band needs sigma >= 0");
    const double s2 = sigma * sigma;
    const double half = std::sqrt(2.0 * static_cast<double>(r)) * s2
                        / std::sqrt(static_cast<double>(s - 1));
    return {s2 - half, s2 + half};
}

} // namespace tnle
