#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace rydbench {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Rank-3 tensor with indices (left bond, physical, right bond).
// Data is stored row-major in (l, p, r) order. The physical dimension is
// usually 2 but can be 2^k for a fused multi-site block.
class Tensor3 {
public:
    Tensor3() : dl_(0), dp_(0), dr_(0) {}
    Tensor3(int dl, int dp, int dr)
        : dl_(dl), dp_(dp), dr_(dr), data_(size_t(dl) * dp * dr, cplx(0, 0)) {
        if (dl < 1 || dp < 1 || dr < 1)
            throw std::invalid_argument("Tensor3: dimensions must be positive");
    }

    int dim_left() const { return dl_; }
    int dim_phys() const { return dp_; }
    int dim_right() const { return dr_; }

    cplx& operator()(int l, int p, int r) {
        return data_[(size_t(l) * dp_ + p) * dr_ + r];
    }
    cplx operator()(int l, int p, int r) const {
        return data_[(size_t(l) * dp_ + p) * dr_ + r];
    }

    // Reshape (l,p),(r): rows combine left bond and physical index.
    Matrix matrix_lp_r() const {
        Matrix m(size_t(dl_) * dp_, dr_);
        for (int l = 0; l < dl_; ++l)
            for (int p = 0; p < dp_; ++p)
                for (int r = 0; r < dr_; ++r)
                    m(size_t(l) * dp_ + p, r) = (*this)(l, p, r);
        return m;
    }

    // Reshape (l),(p,r): columns combine physical index and right bond.
    Matrix matrix_l_pr() const {
        Matrix m(dl_, size_t(dp_) * dr_);
        for (int l = 0; l < dl_; ++l)
            for (int p = 0; p < dp_; ++p)
                for (int r = 0; r < dr_; ++r)
                    m(l, size_t(p) * dr_ + r) = (*this)(l, p, r);
        return m;
    }

    static Tensor3 from_matrix_lp_r(const Matrix& m, int dl, int dp, int dr) {
        if (m.rows() != Eigen::Index(size_t(dl) * dp) || m.cols() != dr)
            throw std::invalid_argument("from_matrix_lp_r: shape mismatch");
        Tensor3 t(dl, dp, dr);
        for (int l = 0; l < dl; ++l)
            for (int p = 0; p < dp; ++p)
                for (int r = 0; r < dr; ++r)
                    t(l, p, r) = m(size_t(l) * dp + p, r);
        return t;
    }

    static Tensor3 from_matrix_l_pr(const Matrix& m, int dl, int dp, int dr) {
        if (m.rows() != dl || m.cols() != Eigen::Index(size_t(dp) * dr))
            throw std::invalid_argument("from_matrix_l_pr: shape mismatch");
        Tensor3 t(dl, dp, dr);
        for (int l = 0; l < dl; ++l)
            for (int p = 0; p < dp; ++p)
                for (int r = 0; r < dr; ++r)
                    t(l, p, r) = m(l, size_t(p) * dr + r);
        return t;
    }

    // Reshape (l,p1),(p2,r) where the physical index factors as p = p1*p2.
    // The row-major layout makes this a flat reinterpretation.
    Matrix matrix_split(int p1, int p2) const {
        if (size_t(p1) * p2 != size_t(dp_))
            throw std::invalid_argument("matrix_split: bad physical factorization");
        using RowMajor =
            Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        return Eigen::Map<const RowMajor>(data_.data(), size_t(dl_) * p1,
                                          size_t(p2) * dr_);
    }

    const cplx* data() const { return data_.data(); }
    cplx* data() { return data_.data(); }

    // Fixed physical index -> (left, right) matrix slice.
    Matrix slice(int p) const {
        Matrix m(dl_, dr_);
        for (int l = 0; l < dl_; ++l)
            for (int r = 0; r < dr_; ++r) m(l, r) = (*this)(l, p, r);
        return m;
    }

    double squared_norm() const {
        double s = 0;
        for (const auto& v : data_) s += std::norm(v);
        return s;
    }

private:
    int dl_, dp_, dr_;
    std::vector<cplx> data_;
};

// Contract two tensors over the shared bond: (l,p1,m) x (m,p2,r) -> (l, p1*p2, r).
inline Tensor3 merge(const Tensor3& a, const Tensor3& b) {
    if (a.dim_right() != b.dim_left())
        throw std::invalid_argument("merge: bond dimension mismatch");
    Matrix m = a.matrix_lp_r() * b.matrix_l_pr();
    // m has shape (l*p1, p2*r); regroup to (l, p1*p2, r).
    int dl = a.dim_left(), p1 = a.dim_phys(), p2 = b.dim_phys(), dr = b.dim_right();
    Tensor3 t(dl, p1 * p2, dr);
    for (int l = 0; l < dl; ++l)
        for (int i = 0; i < p1; ++i)
            for (int j = 0; j < p2; ++j)
                for (int r = 0; r < dr; ++r)
                    t(l, i * p2 + j, r) = m(size_t(l) * p1 + i, size_t(j) * dr + r);
    return t;
}

}  // namespace rydbench
