#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "rydbench/mps.hpp"

namespace rydbench {

// Entanglement measures and the fidelity-based estimates that stand in for
// them when only a noisy state is available. The central object is the
// mixed-state log negativity
//
//     E_N(rho) = log2 || rho^{T_A} ||_1,
//
// and the workhorse estimate is the proxy E_P = E_N(|psi>) + log2(F), a
// provable lower bound when |psi> is an eigenstate of rho. The remaining
// functions quantify how far the proxy can sit below the truth under
// realistic error channels.

constexpr double page_correction = -0.4729172603869500;  // log2(64 / (9 pi^2))

// ============================================================================
// Spectra and exact negativity
// ============================================================================

double vn_entropy(const std::vector<double>& schmidt_values);
double renyi_half(const std::vector<double>& schmidt_values);
double vn_entropy(const SchmidtSpectrum& spec);
double renyi_half(const SchmidtSpectrum& spec);

// Trace norm of the partial transpose over sites 0..cut of a density matrix
// on n_sites qubits, by Hermitian eigendecomposition. `value` clamps at zero
// (separable and PPT states carry no distillable signal); `raw` keeps the
// unclamped log for diagnostics.
struct LogNegativity {
    double value = 0.0;
    double raw = 0.0;
};
LogNegativity log_negativity_mixed(const Matrix& rho, int n_sites, int cut);

// ============================================================================
// Proxy and refinements
// ============================================================================

// E_P = e_pure + log2(F), valid for F in (0, 1].
double proxy(double e_pure, double fidelity);

// A refinement bound whose correction term can consume the whole bound; a
// vacuous result is tagged instead of being returned as -inf so plots can
// gray it out.
struct BoundResult {
    double value = 0.0;
    bool vacuous = false;
};

// Globally depolarized Haar states: rho = F' |psi><psi| + (1 - F') I/D with
// F' = F - (1-F)/(D-1). Their negativity is a function of F and D_A alone:
// E_N = E_N(psi) + log2(f(F)). The first-order correction to f integrates the
// small-eigenvalue tail of the partial-transpose spectrum up to the flip
// point lambda0 = (1-F')/(F' D_A) where the depolarizing shift changes the
// sign of an eigenvalue:
//     f(F) = F' + (9/64) F' lambda0^2 (8 ln 2 - 1 - 2 ln lambda0),
// so f(1) = 1 exactly. Valid while F' D_A >= 1; below that the expansion of
// the spectral density near zero no longer controls the flipped mass.
double mathfrak_f(double fidelity, double dim_a);
double haar_depolarized_estimator(double e_pure, double fidelity, double dim_a);

// Trace-norm triangle inequality applied to rho = F psi + (1-F) rho_perp:
//     log2(F 2^{e_pure} -+ (1-F) ||rho_perp^{T_A}||_1).
// The lower bound goes vacuous when the subtracted term wins.
struct TriangleBounds {
    BoundResult lower;
    double upper = 0.0;
};
TriangleBounds triangle_bounds(double fidelity, double e_pure, double perp_norm);

// Commutator-based lower bound, with C = || [rho, |psi><psi|] ||_F and
// alpha = 2^{e_pure} / D_A the normalized entanglement:
//     E_N >= e_pure + log2(F) + 2 log2(1 - (C/F) sqrt((1-alpha)/(2 alpha))).
BoundResult commutator_bound(double e_pure, double fidelity, double commutator, double alpha);

// For normally distributed global quasistatic parameter errors the
// commutator coefficient collapses onto the fidelity alone:
//     C/F = sqrt(2) * sqrt(2/sqrt(3 + 2F^2 - F^4) - 1).
double c_over_f_quasistatic(double fidelity);

// Eigenstate-fidelity bound, with f the overlap of |psi> with an eigenstate
// of rho:
//     E_N >= e_pure + log2(F) + 2 log2(1 - sqrt((1-f)(1-alpha)/(f alpha))).
BoundResult eigenstate_fidelity_bound(double e_pure, double fidelity, double f_eigen,
                                      double alpha);

// Cauchy-Schwarz control of the eigenstate fidelity from purity and fidelity:
//     1 - f <= (P/F^2 - 1) / (2 P/F^2),
// returned as the lower bound on f. Requires P >= F^2.
double cauchy_schwarz_f(double fidelity, double purity);

// ============================================================================
// Truncated-state analytics
// ============================================================================

// Truncating a maximally entangled state to rank chi: F = chi/D_A and
// E_N = log2(chi).
std::pair<double, double> truncated_maxent(int chi, int dim_a);

// Truncating a Haar state, whose Schmidt values follow the quarter-circle
// law: keeping values above s_min (s_tilde = sqrt(D_A) s_min in [0, 2])
// gives closed parametric forms. e_n(D_A) = log2(D_A) + e_n_minus_log2_da.
struct TruncatedHaarPoint {
    double s_tilde = 0.0;
    double chi_fraction = 0.0;  // chi / D_A
    double fidelity = 0.0;
    double e_n_minus_log2_da = 0.0;
};
TruncatedHaarPoint truncated_haar_curve(double s_tilde_min);

// Entanglement gap between a depolarized Haar state and a fidelity-matched
// truncated Haar state: delta = 3 log2(4/(4 - s_tilde^2)) + 2 log2(F),
// inverted onto fidelity, plus the small-(1-F) shortcut (3/2)(1-F)^{2/3}.
double delta_vs_depolarized(double fidelity);
double delta_vs_depolarized_approx(double fidelity);

// Haar-average closed forms: half-chain negativity N/2 + log2(64/9 pi^2),
// and its blockade-constrained entropy analogue log2(D_0) - 0.47 with D_0
// the constrained dimension of the half chain.
double haar_pure_negativity(int n_sites);
double blockaded_haar_entropy(int n_sites);

// ============================================================================
// Reporting
// ============================================================================

struct NegativityReport {
    double e_n = 0.0;
    double e_pure = 0.0;
    double e_p = 0.0;
    double alpha = 0.0;
    double fidelity = 0.0;
    // Optional refinements; NaN when not computed.
    double commutator;
    double eigenstate_fidelity;
    double haar_estimate;

    NegativityReport();
    std::string text_record() const;
};

// ============================================================================
// Entanglement growth
// ============================================================================

// Sigmoid-interpolated growth law
//     S(t) = S0 + m1 t + (m2 - m1)(t - t_ent - sigma) / (1 + e^{-(t - t_ent)/sigma}),
// fitted jointly across system sizes with S0 and m1 shared, t_ent and sigma
// linear in N, and m2 quadratic in N.
struct GrowthFit {
    double s0 = 0.0;
    double m1 = 0.0;
    std::array<double, 3> m2{};     // m2(N) = m2[0] + m2[1] N + m2[2] N^2
    std::array<double, 2> t_ent{};  // t_ent(N) = t_ent[0] + t_ent[1] N
    std::array<double, 2> sigma{};  // sigma(N) = sigma[0] + sigma[1] N
    double residual_rms = 0.0;

    double m2_at(double n) const { return m2[0] + m2[1] * n + m2[2] * n * n; }
    double t_ent_at(double n) const { return t_ent[0] + t_ent[1] * n; }
    double sigma_at(double n) const { return sigma[0] + sigma[1] * n; }
};

struct GrowthCurvePoint {
    double n = 0.0;
    double t = 0.0;
    double s = 0.0;
};

GrowthFit fit_entanglement_growth(const std::vector<GrowthCurvePoint>& data);
double predict_s(const GrowthFit& fit, double n, double t);

}  // namespace rydbench
