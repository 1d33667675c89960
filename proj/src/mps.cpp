#include "rydbench/mps.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "rydbench/rng.hpp"

namespace rydbench {

// ============================================================
// Schmidt spectra and the truncation ledger
// ============================================================

double SchmidtSpectrum::renyi_half() const {
    double s = 0.0;
    for (double v : values) s += v;
    return 2.0 * std::log2(s);
}

double SchmidtSpectrum::von_neumann() const {
    double h = 0.0;
    for (double v : values) {
        double p = v * v;
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

void TruncationLedger::record(int step, double kept_weight) {
    if (!(kept_weight > 0.0) || kept_weight > 1.0 + 1e-12)
        throw std::runtime_error("truncation kept weight outside (0, 1]");
    entries.emplace_back(step, std::min(kept_weight, 1.0));
}

double TruncationLedger::log_svd_fidelity() const {
    double acc = 0.0;
    for (const auto& [step, w] : entries) acc += std::log(w);
    return acc;
}

double TruncationLedger::svd_fidelity() const {
    return std::exp(log_svd_fidelity());
}

// ============================================================
// Deterministic truncated SVD
// ============================================================

SvdSplit svd_split(const Matrix& m, int chi, double floor) {
    if (chi < 1) throw std::invalid_argument("svd_split: chi must be >= 1");

    // Jacobi is bit-stable and accurate for the small blocks that dominate
    // tests; divide-and-conquer takes over once blocks get large.
    Matrix u_full, v_full;
    Eigen::VectorXd s;
    if (std::min(m.rows(), m.cols()) <= 64) {
        Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u_full = svd.matrixU();
        v_full = svd.matrixV();
        s = svd.singularValues();
    } else {
        Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u_full = svd.matrixU();
        v_full = svd.matrixV();
        s = svd.singularValues();
    }
    const int r = int(s.size());

    double total = 0.0;
    for (int i = 0; i < r; ++i) total += s(i) * s(i);
    if (!(total > 0.0)) throw std::runtime_error("svd_split: zero matrix");
    const double scale = std::sqrt(total);

    int k = 0;
    double kept = 0.0;
    while (k < std::min(chi, r) && s(k) / scale > floor) {
        kept += s(k) * s(k);
        ++k;
    }
    if (k == 0) {  // keep at least one value
        k = 1;
        kept = s(0) * s(0);
    }

    SvdSplit out;
    out.u = u_full.leftCols(k);
    out.vdag = v_full.leftCols(k).adjoint();
    out.values.assign(k, 0.0);
    for (int i = 0; i < k; ++i) out.values[i] = s(i);
    out.kept_weight = kept / total;
    out.discarded_weight = 1.0 - out.kept_weight;

    // Gauge fix: rotate each singular pair so the largest-magnitude entry of
    // the left vector is real and positive. Keeps repeated runs bit-stable.
    for (int j = 0; j < k; ++j) {
        int imax = 0;
        double amax = 0.0;
        for (int i = 0; i < out.u.rows(); ++i) {
            double a = std::abs(out.u(i, j));
            if (a > amax) {
                amax = a;
                imax = i;
            }
        }
        if (amax == 0.0) continue;
        cplx phase = out.u(imax, j) / amax;
        out.u.col(j) *= std::conj(phase);
        out.vdag.row(j) *= phase;
    }
    return out;
}

// ============================================================
// Construction
// ============================================================

Mps Mps::product_state(const std::vector<int>& bits) {
    if (bits.empty()) throw std::invalid_argument("product_state: no sites");
    Mps psi;
    psi.tensors_.reserve(bits.size());
    for (int b : bits) {
        if (b != 0 && b != 1)
            throw std::invalid_argument("product_state: bits must be 0 or 1");
        Tensor3 t(1, 2, 1);
        t(0, b, 0) = 1.0;
        psi.tensors_.push_back(std::move(t));
    }
    psi.center_ = 0;
    return psi;
}

Mps Mps::random_state(int n_sites, int chi, uint64_t seed) {
    if (n_sites < 2) throw std::invalid_argument("random_state: need >= 2 sites");
    if (chi < 1) throw std::invalid_argument("random_state: chi must be >= 1");

    auto cap = [&](int cut) {
        double lhs = std::pow(2.0, std::min(cut + 1, n_sites - 1 - cut));
        return int(std::min<double>(chi, lhs));
    };

    auto rng = make_rng(seed, 0);
    std::normal_distribution<double> g(0.0, 1.0);

    Mps psi;
    psi.tensors_.reserve(n_sites);
    for (int i = 0; i < n_sites; ++i) {
        int dl = (i == 0) ? 1 : cap(i - 1);
        int dr = (i == n_sites - 1) ? 1 : cap(i);
        Tensor3 t(dl, 2, dr);
        for (int l = 0; l < dl; ++l)
            for (int p = 0; p < 2; ++p)
                for (int r = 0; r < dr; ++r) t(l, p, r) = cplx(g(rng), g(rng));
        psi.tensors_.push_back(std::move(t));
    }
    psi.center_ = n_sites - 1;
    psi.canonicalize(0);

    Matrix m = psi.tensors_[0].matrix_lp_r();
    double nrm = m.norm();
    if (!(nrm > 0.0)) throw std::runtime_error("random_state: degenerate draw");
    m /= nrm;
    psi.tensors_[0] = Tensor3::from_matrix_lp_r(m, 1, 2, psi.tensors_[0].dim_right());
    psi.norm_log_ = 0.0;
    return psi;
}

Mps Mps::from_tensors(std::vector<Tensor3> tensors, int center) {
    if (tensors.empty()) throw std::invalid_argument("from_tensors: no sites");
    if (center < 0 || center >= int(tensors.size()))
        throw std::invalid_argument("from_tensors: bad center");
    if (tensors.front().dim_left() != 1 || tensors.back().dim_right() != 1)
        throw std::invalid_argument("from_tensors: boundary bonds must be 1");
    for (size_t i = 0; i + 1 < tensors.size(); ++i)
        if (tensors[i].dim_right() != tensors[i + 1].dim_left())
            throw std::invalid_argument("from_tensors: bond mismatch");
    Mps psi;
    psi.tensors_ = std::move(tensors);
    psi.center_ = center;
    return psi;
}

// ============================================================
// Canonical form
// ============================================================

int Mps::bond_dim(int cut) const {
    if (cut < 0 || cut >= n_cuts()) throw std::invalid_argument("bad cut index");
    return tensors_[cut].dim_right();
}

std::vector<int> Mps::bond_dims() const {
    std::vector<int> out(n_cuts());
    for (int c = 0; c < n_cuts(); ++c) out[c] = tensors_[c].dim_right();
    return out;
}

int Mps::max_bond_dim() const {
    int m = 1;
    for (const auto& t : tensors_) m = std::max(m, t.dim_right());
    return m;
}

void Mps::shift_center_right() {
    const int i = center_;
    const Tensor3& t = tensors_[i];
    const int dl = t.dim_left(), dp = t.dim_phys(), dr = t.dim_right();
    const int k = std::min(dl * dp, dr);

    Eigen::HouseholderQR<Matrix> qr(t.matrix_lp_r());
    Matrix q = qr.householderQ() * Matrix::Identity(dl * dp, k);
    Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();

    for (int j = 0; j < k; ++j) {  // real-positive diagonal of R
        cplx d = r(j, j);
        double a = std::abs(d);
        if (a == 0.0) continue;
        cplx phase = d / a;
        q.col(j) *= phase;
        r.row(j) *= std::conj(phase);
    }

    tensors_[i] = Tensor3::from_matrix_lp_r(q, dl, dp, k);
    const Tensor3& nxt = tensors_[i + 1];
    Matrix merged = r * nxt.matrix_l_pr();
    tensors_[i + 1] =
        Tensor3::from_matrix_l_pr(merged, k, nxt.dim_phys(), nxt.dim_right());
    ++center_;
}

void Mps::shift_center_left() {
    const int i = center_;
    const Tensor3& t = tensors_[i];
    const int dl = t.dim_left(), dp = t.dim_phys(), dr = t.dim_right();
    const int k = std::min(dl, dp * dr);

    // M = L Q with orthonormal rows of Q, via QR of the adjoint.
    Eigen::HouseholderQR<Matrix> qr(t.matrix_l_pr().adjoint());
    Matrix q = qr.householderQ() * Matrix::Identity(dp * dr, k);
    Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();

    for (int j = 0; j < k; ++j) {
        cplx d = r(j, j);
        double a = std::abs(d);
        if (a == 0.0) continue;
        cplx phase = d / a;
        q.col(j) *= phase;
        r.row(j) *= std::conj(phase);
    }

    tensors_[i] = Tensor3::from_matrix_l_pr(q.adjoint(), k, dp, dr);
    const Tensor3& prv = tensors_[i - 1];
    Matrix merged = prv.matrix_lp_r() * r.adjoint();
    tensors_[i - 1] =
        Tensor3::from_matrix_lp_r(merged, prv.dim_left(), prv.dim_phys(), k);
    --center_;
}

void Mps::canonicalize(int center) {
    if (center < 0 || center >= n_sites())
        throw std::invalid_argument("canonicalize: bad center");
    while (center_ < center) shift_center_right();
    while (center_ > center) shift_center_left();
}

double Mps::truncate_cut(int cut, int chi) {
    if (cut < 0 || cut >= n_cuts()) throw std::invalid_argument("bad cut index");
    if (chi < 1) throw std::invalid_argument("truncate_cut: chi must be >= 1");
    if (center_ != cut && center_ != cut + 1)
        throw std::runtime_error("truncate_cut: center not at the cut");

    if (center_ == cut) {
        const Tensor3& t = tensors_[cut];
        SvdSplit sp = svd_split(t.matrix_lp_r(), chi);
        const int k = int(sp.values.size());

        double kept_abs = 0.0;
        for (double v : sp.values) kept_abs += v * v;
        double inv = 1.0 / std::sqrt(kept_abs);
        norm_log_ += 0.5 * std::log(kept_abs / sp.kept_weight);

        Matrix sv = sp.vdag;
        for (int j = 0; j < k; ++j) sv.row(j) *= sp.values[j] * inv;

        tensors_[cut] = Tensor3::from_matrix_lp_r(sp.u, t.dim_left(), t.dim_phys(), k);
        const Tensor3& nxt = tensors_[cut + 1];
        Matrix merged = sv * nxt.matrix_l_pr();
        tensors_[cut + 1] =
            Tensor3::from_matrix_l_pr(merged, k, nxt.dim_phys(), nxt.dim_right());
        center_ = cut + 1;

        ledger_.record(ledger_step_, sp.kept_weight);
        return sp.kept_weight;
    }

    // center == cut + 1: mirror image, the right tensor becomes right-canonical
    const Tensor3& t = tensors_[cut + 1];
    SvdSplit sp = svd_split(t.matrix_l_pr(), chi);
    const int k = int(sp.values.size());

    double kept_abs = 0.0;
    for (double v : sp.values) kept_abs += v * v;
    double inv = 1.0 / std::sqrt(kept_abs);
    norm_log_ += 0.5 * std::log(kept_abs / sp.kept_weight);

    Matrix us = sp.u;
    for (int j = 0; j < k; ++j) us.col(j) *= sp.values[j] * inv;

    tensors_[cut + 1] = Tensor3::from_matrix_l_pr(sp.vdag, k, t.dim_phys(), t.dim_right());
    const Tensor3& prv = tensors_[cut];
    Matrix merged = prv.matrix_lp_r() * us;
    tensors_[cut] =
        Tensor3::from_matrix_lp_r(merged, prv.dim_left(), prv.dim_phys(), k);
    center_ = cut;

    ledger_.record(ledger_step_, sp.kept_weight);
    return sp.kept_weight;
}

// ============================================================
// Read-out
// ============================================================

cplx Mps::amplitude(const std::vector<int>& bits) const {
    if (int(bits.size()) != n_sites())
        throw std::invalid_argument("amplitude: wrong bitstring length");
    Matrix v = Matrix::Ones(1, 1);
    for (int i = 0; i < n_sites(); ++i) {
        if (bits[i] != 0 && bits[i] != 1)
            throw std::invalid_argument("amplitude: bits must be 0 or 1");
        v = v * tensors_[i].slice(bits[i]);
    }
    return v(0, 0);
}

SchmidtSpectrum Mps::schmidt_spectrum(int cut) const {
    if (cut < 0 || cut >= n_cuts()) throw std::invalid_argument("bad cut index");
    Mps work = *this;
    work.canonicalize(cut);
    Eigen::JacobiSVD<Matrix> svd(work.tensors_[cut].matrix_lp_r());
    const auto& s = svd.singularValues();

    double total = 0.0;
    for (int i = 0; i < s.size(); ++i) total += s(i) * s(i);
    double scale = std::sqrt(total);

    SchmidtSpectrum out;
    out.cut = cut;
    for (int i = 0; i < s.size(); ++i) {
        double v = s(i) / scale;
        if (v > schmidt_floor) out.values.push_back(v);
    }
    if (out.values.empty()) out.values.push_back(1.0);
    return out;
}

std::vector<std::vector<int>> Mps::sample(int shots, uint64_t seed) const {
    if (shots < 0) throw std::invalid_argument("sample: negative shot count");

    const Mps* src = this;
    Mps work;
    if (center_ != 0) {
        work = *this;
        work.canonicalize(0);
        src = &work;
    }

    const int n = n_sites();
    std::vector<std::vector<int>> out(shots);
    for (int m = 0; m < shots; ++m) {
        auto rng = make_rng(seed, uint64_t(m));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<int> bits(n);

        Matrix left = Matrix::Ones(1, 1);
        for (int i = 0; i < n; ++i) {
            Matrix v0 = left * src->tensors_[i].slice(0);
            Matrix v1 = left * src->tensors_[i].slice(1);
            double q0 = v0.squaredNorm();
            double q1 = v1.squaredNorm();
            double p1 = q1 / (q0 + q1);
            int b = (unif(rng) < p1) ? 1 : 0;
            bits[i] = b;
            left = (b ? v1 : v0) / std::sqrt(b ? q1 : q0);
        }
        out[m] = std::move(bits);
    }
    return out;
}

double Mps::left_canonical_error(int site) const {
    Matrix a = tensors_.at(site).matrix_lp_r();
    Matrix g = a.adjoint() * a;
    g -= Matrix::Identity(g.rows(), g.cols());
    return g.cwiseAbs().maxCoeff();
}

double Mps::right_canonical_error(int site) const {
    Matrix b = tensors_.at(site).matrix_l_pr();
    Matrix g = b * b.adjoint();
    g -= Matrix::Identity(g.rows(), g.cols());
    return g.cwiseAbs().maxCoeff();
}

cplx overlap(const Mps& a, const Mps& b) {
    if (a.n_sites() != b.n_sites())
        throw std::invalid_argument("overlap: size mismatch");
    Matrix env = Matrix::Ones(1, 1);
    for (int i = 0; i < a.n_sites(); ++i) {
        const Tensor3& ta = a.tensor(i);
        const Tensor3& tb = b.tensor(i);
        if (ta.dim_phys() != tb.dim_phys())
            throw std::invalid_argument("overlap: physical dimension mismatch");
        Matrix next = Matrix::Zero(ta.dim_right(), tb.dim_right());
        for (int p = 0; p < ta.dim_phys(); ++p)
            next += ta.slice(p).adjoint() * env * tb.slice(p);
        env = std::move(next);
    }
    return env(0, 0);
}

}  // namespace rydbench
