#include "rydbench/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace rydbench {

size_t bits_to_index(const std::vector<int>& bits) {
    size_t z = 0;
    for (int b : bits) {
        if (b != 0 && b != 1) throw std::invalid_argument("bits must be 0 or 1");
        z = (z << 1) | size_t(b);
    }
    return z;
}

std::vector<int> index_to_bits(size_t z, int n) {
    std::vector<int> bits(n);
    for (int i = n - 1; i >= 0; --i) {
        bits[i] = int(z & 1);
        z >>= 1;
    }
    return bits;
}

Vector to_dense(const Mps& psi) {
    const int n = psi.n_sites();
    if (n > 24) throw std::invalid_argument("to_dense: state too large");
    Matrix cur = Matrix::Ones(1, 1);
    for (int i = 0; i < n; ++i) {
        Matrix m0 = cur * psi.tensor(i).slice(0);
        Matrix m1 = cur * psi.tensor(i).slice(1);
        Matrix nxt(2 * cur.rows(), m0.cols());
        for (Eigen::Index z = 0; z < cur.rows(); ++z) {
            nxt.row(2 * z) = m0.row(z);
            nxt.row(2 * z + 1) = m1.row(z);
        }
        cur = std::move(nxt);
    }
    return cur.col(0);
}

Mps mps_from_dense(const Vector& amp, int n_sites, int chi) {
    if (amp.size() != (Eigen::Index(1) << n_sites))
        throw std::invalid_argument("mps_from_dense: size is not 2^n");
    double nrm = amp.norm();
    if (!(nrm > 0.0)) throw std::invalid_argument("mps_from_dense: zero vector");

    Mps psi = Mps::product_state(std::vector<int>(n_sites, 0));
    // Peel sites off the left: reshape the remainder as (2 x rest), split.
    Matrix rest = amp / nrm;
    int left_bond = 1;
    for (int i = 0; i < n_sites - 1; ++i) {
        Eigen::Index rows = Eigen::Index(left_bond) * 2;
        Eigen::Index cols = rest.size() / rows;
        Matrix m(rows, cols);
        // rest is (left_bond * 2^{n-i}) x 1 flattened row-major over
        // (left, remaining bits); regroup to (left*first bit) x (rest bits).
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rest(r * cols + c);

        SvdSplit sp = svd_split(m, chi);
        const int k = int(sp.values.size());
        psi.replace_tensor(i, Tensor3::from_matrix_lp_r(sp.u, left_bond, 2, k));
        Matrix sv = sp.vdag;
        double kept = 0.0;
        for (double v : sp.values) kept += v * v;
        double inv = 1.0 / std::sqrt(kept);
        for (int j = 0; j < k; ++j) sv.row(j) *= sp.values[j] * inv;
        // Flatten row-major over (new bond, remaining bits).
        Matrix flat(sv.rows() * sv.cols(), 1);
        for (Eigen::Index r = 0; r < sv.rows(); ++r)
            for (Eigen::Index c = 0; c < sv.cols(); ++c)
                flat(r * sv.cols() + c) = sv(r, c);
        rest = std::move(flat);
        left_bond = k;
    }
    Matrix lastm(left_bond * 2, 1);
    for (Eigen::Index r = 0; r < lastm.rows(); ++r) lastm(r, 0) = rest(r);
    psi.replace_tensor(n_sites - 1, Tensor3::from_matrix_lp_r(lastm, left_bond, 2, 1));
    psi.set_center_unchecked(n_sites - 1);
    return psi;
}

void apply_block_dense(Vector& amp, const Matrix& u, int n_sites, int first_site, int k) {
    if (k < 1 || first_site < 0 || first_site + k > n_sites)
        throw std::invalid_argument("apply_block_dense: block out of range");
    const Eigen::Index dk = Eigen::Index(1) << k;
    if (u.rows() != dk || u.cols() != dk)
        throw std::invalid_argument("apply_block_dense: gate dimension mismatch");

    const int right_bits = n_sites - first_site - k;
    const Eigen::Index n_hi = Eigen::Index(1) << first_site;
    const Eigen::Index n_lo = Eigen::Index(1) << right_bits;

    Vector block(dk);
    for (Eigen::Index hi = 0; hi < n_hi; ++hi) {
        for (Eigen::Index lo = 0; lo < n_lo; ++lo) {
            const Eigen::Index base = hi * (dk * n_lo) + lo;
            for (Eigen::Index m = 0; m < dk; ++m) block(m) = amp(base + m * n_lo);
            block = u * block;
            for (Eigen::Index m = 0; m < dk; ++m) amp(base + m * n_lo) = block(m);
        }
    }
}

Matrix expm_hermitian(const Matrix& h, cplx prefactor) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("expm_hermitian: eigendecomposition failed");
    Vector phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases(i) = std::exp(prefactor * es.eigenvalues()(i));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Vector evolve_dense(const Matrix& h, const Vector& amp, double t) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("evolve_dense: eigendecomposition failed");
    Vector coeff = es.eigenvectors().adjoint() * amp;
    for (Eigen::Index i = 0; i < coeff.size(); ++i)
        coeff(i) *= std::exp(cplx(0.0, -2.0 * M_PI * es.eigenvalues()(i) * t));
    return es.eigenvectors() * coeff;
}

Matrix propagator(const Matrix& h, double t) {
    return expm_hermitian(h, cplx(0.0, -2.0 * M_PI * t));
}

std::vector<double> schmidt_values_dense(const Vector& amp, int n_sites, int cut) {
    if (cut < 0 || cut >= n_sites - 1)
        throw std::invalid_argument("schmidt_values_dense: bad cut");
    const Eigen::Index rows = Eigen::Index(1) << (cut + 1);
    const Eigen::Index cols = amp.size() / rows;
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = amp(r * cols + c);

    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    double total = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) total += s(i) * s(i);
    double scale = std::sqrt(total);

    std::vector<double> out;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) / scale > Mps::schmidt_floor) out.push_back(s(i) / scale);
    if (out.empty()) out.push_back(1.0);
    return out;
}

Matrix density_matrix(const Vector& amp) {
    return amp * amp.adjoint();
}

Matrix partial_trace(const Matrix& rho, int n_sites, const std::vector<int>& keep) {
    if (rho.rows() != rho.cols() || rho.rows() != (Eigen::Index(1) << n_sites))
        throw std::invalid_argument("partial_trace: dimension mismatch");
    if (!std::is_sorted(keep.begin(), keep.end()))
        throw std::invalid_argument("partial_trace: keep list must be sorted");
    for (int s : keep)
        if (s < 0 || s >= n_sites)
            throw std::invalid_argument("partial_trace: site out of range");

    std::vector<int> traced;
    for (int s = 0; s < n_sites; ++s)
        if (!std::binary_search(keep.begin(), keep.end(), s)) traced.push_back(s);

    const int nk = int(keep.size());
    const int nt = int(traced.size());
    const size_t dk = size_t(1) << nk;
    const size_t dt = size_t(1) << nt;

    auto full_index = [&](size_t zk, size_t zt) {
        size_t z = 0;
        for (int i = 0; i < nk; ++i)
            if (zk & (size_t(1) << (nk - 1 - i)))
                z |= size_t(1) << (n_sites - 1 - keep[i]);
        for (int i = 0; i < nt; ++i)
            if (zt & (size_t(1) << (nt - 1 - i)))
                z |= size_t(1) << (n_sites - 1 - traced[i]);
        return z;
    };

    Matrix out = Matrix::Zero(dk, dk);
    for (size_t a = 0; a < dk; ++a)
        for (size_t b = 0; b < dk; ++b) {
            cplx acc = 0.0;
            for (size_t t = 0; t < dt; ++t)
                acc += rho(full_index(a, t), full_index(b, t));
            out(a, b) = acc;
        }
    return out;
}

}  // namespace rydbench
