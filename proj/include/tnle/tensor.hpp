#pragma once

#include <cstddef>
#include <vector>

#include "tnle/matrix.hpp"

namespace tnle {

/// Dense third-order tensor, stored slice-major (frontal-slice index
/// outermost) and row-major within a slice. Element access is 0-based;
/// the slice arguments of frontal_slice / identity_slice_tensor are
/// 1-based, matching the usual A(:,:,i), i = 1..n3 notation for frontal
/// slices.
class Tensor3 {
public:
    Tensor3() = default;

    Tensor3(std::size_t n1, std::size_t n2, std::size_t n3);
    Tensor3(std::size_t n1, std::size_t n2, std::size_t n3, std::vector<double> data);

    std::size_t n1() const { return n1_; }
    std::size_t n2() const { return n2_; }
    std::size_t n3() const { return n3_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return data_[(k * n1_ + i) * n2_ + j];
    }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(k * n1_ + i) * n2_ + j];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool operator==(const Tensor3&) const = default;

private:
    std::size_t n1_ = 0;
    std::size_t n2_ = 0;
    std::size_t n3_ = 0;
    std::vector<double> data_;
};

/// Block-diagonal matrix kept as its list of square diagonal blocks; the
/// off-block entries are implicitly zero, so the eigenvalue multiset is
/// the union of the blocks' eigenvalue multisets.
struct BlockDiagMatrix {
    std::vector<Matrix> blocks;

    std::size_t order() const {
        std::size_t r = 0;
        for (const auto& b : blocks) r += b.rows();
        return r;
    }
};

/// i-th frontal slice A(:,:,i), i 1-based.
Matrix frontal_slice(const Tensor3& t, std::size_t slice);

/// Block-circulant expansion: block (p,q) is the frontal slice with
/// 1-based index ((p-q) mod n3)+1. Result is (n1*n3) x (n2*n3).
Matrix circ(const Tensor3& t);

/// Frontal slices stacked vertically in order 1..n3: (n1*n3) x n2.
Matrix mat_vec(const Tensor3& t);

/// Inverse of mat_vec: splits the stacked matrix back into n3 slices.
Tensor3 fold(const Matrix& m, std::size_t n3);

/// T-product of a (n1 x n2 x n3) with b (n2 x n4 x n3), defined as
/// fold(circ(a) * mat_vec(b)). Computed block-wise without materializing
/// the circulant; the summation order matches the dense product exactly.
Tensor3 t_product(const Tensor3& a, const Tensor3& b);

/// m x m x n3 tensor whose given slice (1-based) is the identity and all
/// other slices are zero.
Tensor3 identity_slice_tensor(std::size_t m, std::size_t n3, std::size_t slice);

/// Assembles a block-diagonal matrix from square blocks, order preserved.
BlockDiagMatrix bdiag(std::vector<Matrix> blocks);

} // namespace tnle
