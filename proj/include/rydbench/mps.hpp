#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rydbench/tensor3.hpp"

namespace rydbench {

// Schmidt values across one cut, descending, normalized so sum of squares is 1.
struct SchmidtSpectrum {
    int cut = 0;
    std::vector<double> values;

    double renyi_half() const;       // 2*log2(sum of values)
    double von_neumann() const;      // -sum s^2 log2 s^2
};

// Log of every truncation performed on a state: (step tag, kept weight).
// The product of kept weights estimates the fidelity of the truncated state
// to the state one would have kept with unbounded bond dimension.
struct TruncationLedger {
    std::vector<std::pair<int, double>> entries;

    void record(int step, double kept_weight);
    double svd_fidelity() const;      // product of kept weights, 1 if empty
    double log_svd_fidelity() const;  // summed in log space
};

inline double svd_fidelity(const TruncationLedger& ledger) {
    return ledger.svd_fidelity();
}

struct TruncationResult {
    double kept_weight = 1.0;  // sum of squared Schmidt values retained
    int new_bond = 0;
};

// Matrix product state over N two-level sites.
//
// Tensors are rank-3 (left bond, physical=2, right bond); boundary bonds have
// dimension 1. The orthogonality center is tracked explicitly: tensors left of
// it are left-canonical, tensors right of it right-canonical. All public
// operations keep the state unit-normalized; factored-out norms accumulate in
// log space.
class Mps {
public:
    // |b_0 b_1 ... b_{N-1}> with every bond dimension 1.
    static Mps product_state(const std::vector<int>& bits);

    // Random state with bond dimensions grown to min(chi, maximal), then
    // canonicalized and normalized. Deterministic in the seed.
    static Mps random_state(int n_sites, int chi, uint64_t seed);

    // Assemble from per-site tensors (bonds must chain, boundaries dim 1).
    // The caller asserts the canonical structure implied by `center`.
    static Mps from_tensors(std::vector<Tensor3> tensors, int center);

    int n_sites() const { return int(tensors_.size()); }
    // Cut k separates sites 0..k and k+1..N-1; valid k: 0..N-2.
    int n_cuts() const { return n_sites() - 1; }
    int bond_dim(int cut) const;
    std::vector<int> bond_dims() const;
    int max_bond_dim() const;

    const Tensor3& tensor(int site) const { return tensors_.at(site); }
    Tensor3& tensor(int site) { return tensors_.at(site); }

    int center() const { return center_; }
    double norm_log() const { return norm_log_; }

    const TruncationLedger& ledger() const { return ledger_; }
    TruncationLedger& ledger() { return ledger_; }
    void set_ledger_step(int step) { ledger_step_ = step; }

    // Move the orthogonality center; preserves the state exactly (QR sweeps).
    void canonicalize(int center);

    // Truncate the bond at `cut` to at most `chi` Schmidt values (values below
    // the numerical floor are always dropped). The state must be canonical at
    // the cut; the kept weight is recorded in the ledger and the state is
    // renormalized. Returns the kept weight.
    double truncate_cut(int cut, int chi);

    // <z|psi> for the unit-normalized state.
    cplx amplitude(const std::vector<int>& bits) const;

    SchmidtSpectrum schmidt_spectrum(int cut) const;

    // Draw `shots` bitstrings z ~ |<z|psi>|^2 by sequential conditional
    // sampling, left to right. Shot m depends only on (seed, m).
    std::vector<std::vector<int>> sample(int shots, uint64_t seed) const;

    // Verification helpers: max deviation from the canonical-form identities.
    double left_canonical_error(int site) const;
    double right_canonical_error(int site) const;

    // Used by the evolvers; not part of day-to-day use.
    void replace_tensor(int site, Tensor3 t) { tensors_.at(site) = std::move(t); }
    void add_norm_log(double x) { norm_log_ += x; }
    void set_center_unchecked(int c) { center_ = c; }

    static constexpr double schmidt_floor = 1e-14;

private:
    Mps() = default;
    void shift_center_right();  // QR step center -> center+1
    void shift_center_left();

    std::vector<Tensor3> tensors_;
    int center_ = 0;
    double norm_log_ = 0.0;
    TruncationLedger ledger_;
    int ledger_step_ = 0;
};

// <a|b> for unit-normalized states of equal length.
cplx overlap(const Mps& a, const Mps& b);

// Split a matrix M = U diag(s) V^dagger, drop values below the floor and keep
// at most chi, with a deterministic gauge (largest-magnitude entry of each
// retained left singular vector made real-positive). Returns the kept weight
// relative to the total squared spectrum. Building block for every truncation
// in the library.
struct SvdSplit {
    Matrix u;                    // m x k
    std::vector<double> values;  // k, descending, unnormalized
    Matrix vdag;                 // k x n
    double kept_weight = 1.0;
    double discarded_weight = 0.0;
};
SvdSplit svd_split(const Matrix& m, int chi, double floor = Mps::schmidt_floor);

}  // namespace rydbench
