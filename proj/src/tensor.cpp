#include "tnle/tensor.hpp"

#include <stdexcept>

namespace tnle {

Tensor3::Tensor3(std::size_t n1, std::size_t n2, std::size_t n3)
    : n1_(n1), n2_(n2), n3_(n3), data_(n1 * n2 * n3, 0.0) {
    if (n1 == 0 || n2 == 0 || n3 == 0) throw std::invalid_argument("tensor dims must be positive");
}

Tensor3::Tensor3(std::size_t n1, std::size_t n2, std::size_t n3, std::vector<double> data)
    : n1_(n1), n2_(n2), n3_(n3), data_(std::move(data)) {
    if (n1 == 0 || n2 == 0 || n3 == 0) throw std::invalid_argument("tensor dims must be positive");
    if (data_.size() != n1 * n2 * n3) throw std::invalid_argument("tensor data size mismatch");
}

Matrix frontal_slice(const Tensor3& t, std::size_t slice) {
    if (slice < 1 || slice > t.n3()) throw std::invalid_argument("slice index out of range");
    Matrix m(t.n1(), t.n2());
    const std::size_t k = slice - 1;
    for (std::size_t i = 0; i < t.n1(); ++i)
        for (std::size_t j = 0; j < t.n2(); ++j) m(i, j) = t(i, j, k);
    return m;
}

Matrix circ(const Tensor3& t) {
    const std::size_t n1 = t.n1(), n2 = t.n2(), n3 = t.n3();
    Matrix m(n1 * n3, n2 * n3);
    for (std::size_t p = 0; p < n3; ++p) {
        for (std::size_t q = 0; q < n3; ++q) {
            const std::size_t k = (p + n3 - q) % n3; // 0-based slice of block (p,q)
            for (std::size_t i = 0; i < n1; ++i)
                for (std::size_t j = 0; j < n2; ++j)
                    m(p * n1 + i, q * n2 + j) = t(i, j, k);
        }
    }
    return m;
}

Matrix mat_vec(const Tensor3& t) {
    Matrix m(t.n1() * t.n3(), t.n2());
    for (std::size_t k = 0; k < t.n3(); ++k)
        for (std::size_t i = 0; i < t.n1(); ++i)
            for (std::size_t j = 0; j < t.n2(); ++j) m(k * t.n1() + i, j) = t(i, j, k);
    return m;
}

Tensor3 fold(const Matrix& m, std::size_t n3) {
    if (n3 == 0 || m.rows() % n3 != 0) throw std::invalid_argument("fold shape");
    const std::size_t n1 = m.rows() / n3;
    Tensor3 t(n1, m.cols(), n3);
    for (std::size_t k = 0; k < n3; ++k)
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) t(i, j, k) = m(k * n1 + i, j);
    return t;
}

Tensor3 t_product(const Tensor3& a, const Tensor3& b) {
    if (a.n2() != b.n1() || a.n3() != b.n3()) throw std::invalid_argument("t-product shape");
    const std::size_t n1 = a.n1(), n2 = a.n2(), n4 = b.n2(), n3 = a.n3();
    Tensor3 out(n1, n4, n3);
    // Slice p of the result is sum_q A_((p-q) mod n3) * B_q. The q-outer,
    // k-inner accumulation below adds terms in the same order as the dense
    // circ(a) * mat_vec(b) product, so both routes agree bit for bit.
    for (std::size_t p = 0; p < n3; ++p) {
        for (std::size_t i = 0; i < n1; ++i) {
            for (std::size_t j = 0; j < n4; ++j) {
                double acc = 0.0;
                for (std::size_t q = 0; q < n3; ++q) {
                    const std::size_t ka = (p + n3 - q) % n3;
                    for (std::size_t k = 0; k < n2; ++k) acc += a(i, k, ka) * b(k, j, q);
                }
                out(i, j, p) = acc;
            }
        }
    }
    return out;
}

Tensor3 identity_slice_tensor(std::size_t m, std::size_t n3, std::size_t slice) {
    if (m == 0) throw std::invalid_argument("identity order must be positive");
    if (slice < 1 || slice > n3) throw std::invalid_argument("slice index out of range");
    Tensor3 t(m, m, n3);
    for (std::size_t i = 0; i < m; ++i) t(i, i, slice - 1) = 1.0;
    return t;
}

BlockDiagMatrix bdiag(std::vector<Matrix> blocks) {
    for (const auto& b : blocks)
        if (b.rows() != b.cols()) throw std::invalid_argument("bdiag block not square");
    return BlockDiagMatrix{std::move(blocks)};
}

} // namespace tnle
