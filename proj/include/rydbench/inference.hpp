#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rydbench/mlp.hpp"

namespace rydbench {

// One row of the fidelity table the ensemble learns from. chi_tilde is the
// log-normalized bond dimension log(chi)/log(chi0(N, t)) with chi0 the
// saturation bond dimension for that size and time.
struct TrainingPoint {
    int n_sites = 0;
    double time = 0.0;
    int chi = 0;
    double chi_tilde = 0.0;
    double fd = 0.0;
    double sigma = 0.0;
};

// CSV with header N,t,chi,chi_tilde,fd,sigma.
std::vector<TrainingPoint> load_training_table(const std::string& path);
void save_training_table(const std::string& path,
                         const std::vector<TrainingPoint>& rows);

// ---- saturation bond dimension --------------------------------------------

struct FidelityCurve {
    std::vector<int> chis;          // ascending
    std::vector<double> fidelities;
};

struct ChiZeroResult {
    int chi0 = 0;
    bool censored = false;  // curve never crossed the threshold
};

// Minimum chi whose classical fidelity exceeds the threshold.
ChiZeroResult chi_zero(const FidelityCurve& curve, double threshold = 0.999);

// Largest Schmidt rank available to a blockade-respecting chain state:
// the blockaded dimension of the smaller half, Fibonacci(floor(N/2) + 2).
int blockade_rank_cap(int n_sites);

struct ChiZeroPoint {
    int n_sites = 0;
    double time = 0.0;
    int chi0 = 0;
};

// chi0(N, t) = min(exp(a * min(t, c N) + b), rank cap): exponential growth at
// the linear-entanglement rate until saturation at a time proportional to N,
// clipped by the blockade rank cap. Fitted in log space by Nelder-Mead.
struct ChiZeroExtrapolator {
    double a = 0.0, b = 0.0, c = 0.0;
    double residual_rms = 0.0;  // in log chi0

    double log_chi0(int n_sites, double t) const;
    double operator()(int n_sites, double t) const;
};
ChiZeroExtrapolator fit_chi_zero(const std::vector<ChiZeroPoint>& grid);

// ---- Monte Carlo ensemble --------------------------------------------------

struct EnsembleConfig {
    int n_models = 64;
    int redraw_every = 3;  // models sharing one hyperparameter draw
    int min_hidden_layers = 1, max_hidden_layers = 4;
    int min_width = 8, max_width = 128;
    double lr_min = 1e-4, lr_max = 1e-2;
    std::vector<int> batch_sizes = {32, 64, 128};
    int patience = 50;
    int max_epochs = 300;
    // Points with chi_tilde at least this, at the held-out sizes, form the
    // validation set.
    double validation_chi_tilde = 0.9;
    // Models are independent (weights and hyperparameters are keyed by model
    // index), so training order cannot change the result and the ensemble is
    // bit-identical at any thread count.
    int n_threads = 1;
    uint64_t seed = 0;

    void validate() const;
};

struct Ensemble {
    std::vector<Mlp> models;
    Eigen::Vector3d input_mean = Eigen::Vector3d::Zero();
    Eigen::Vector3d input_std = Eigen::Vector3d::Ones();
    std::vector<double> validation_rmse;  // per model, best epoch
    std::vector<int> validation_sizes;    // the held-out N values
    EnsembleConfig config;
};

// Trains config.n_models regressors of F(N, t, chi_tilde). Hyperparameters
// are redrawn every `redraw_every` models; every model gets its own weight
// seed. Inputs are standardized over the training split. The validation
// split holds out two mid-range system sizes at high chi_tilde (falling back
// to a random 15% split when the data lacks that structure).
Ensemble train_ensemble(const std::vector<TrainingPoint>& data,
                        const EnsembleConfig& config);

struct Prediction {
    double mean = 0.0;
    double sem = 0.0;          // ensemble standard error of the mean
    double total_sigma = 0.0;  // sem and sampling error in quadrature
};

Prediction predict(const Ensemble& ensemble, int n_sites, double t,
                   double chi_tilde = 1.0, double sampling_sigma = 0.0);

// Directory of per-model weight vectors plus a manifest.
void save_ensemble(const std::string& dir, const Ensemble& ensemble);
Ensemble load_ensemble(const std::string& dir);

// ---- chi* and decay fits ---------------------------------------------------

struct ChiStarResult {
    int chi_star = 1;
    bool extrapolated = false;
};

// Minimum chi whose classical fidelity matches or beats the experiment at
// every time. The family holds F_svd(t) rows for ascending chis on the same
// time grid. When the top of the family still loses somewhere, chi* is
// linearly extrapolated in chi from the top two rows and flagged.
ChiStarResult chi_star(const std::vector<double>& experiment_f,
                       const std::vector<int>& chis,
                       const std::vector<std::vector<double>>& fsvd_family);

struct StretchedExpFit {
    double tau = 0.0;
    double beta = 0.0;
    double t_exact = 0.0;  // end of the excluded F ~ 1 window
    double chi_tilde = 0.0;
    double residual_rms = 0.0;  // in F
    bool converged = false;
};

// Fit F_svd(t) = exp(-(t/tau)^beta) past the exact window (the while of
// F_svd >= threshold), by linear regression of ln(-ln F) on ln t. Needs at
// least four usable points past the window.
StretchedExpFit fit_fsvd_decay(const std::vector<double>& times,
                               const std::vector<double>& fsvd,
                               double chi_tilde = 1.0,
                               double exact_threshold = 0.999);

// ---- cost model -------------------------------------------------------------

struct CostReference {
    int chi_ref = 0;
    int n_ref = 0;
    double seconds_ref = 0.0;
};

struct CostEstimate {
    double sim_seconds = 0.0;       // scales as N chi^3
    double memory_bytes = 0.0;      // complex tensors, N * 2 * chi^2
    double per_sample_seconds = 0.0;  // scales as N chi^2
};

CostEstimate cost_model(int chi, int n_sites, const CostReference& ref);

struct ChiStarCurvePoint {
    double per_atom_fidelity = 0.0;
    double chi_star = 0.0;
    bool extrapolated = false;
};

// Per-atom fidelity curve: target total fidelity at (N, t) is curlyF^(N t);
// each grid value maps to the minimum chi whose F_svd at that time reaches
// the target, linearly extrapolated above the simulated family when needed.
std::vector<ChiStarCurvePoint> chi_star_vs_per_atom_fidelity(
    const std::vector<double>& per_atom_grid, int n_sites, double t,
    const std::vector<int>& chis, const std::vector<double>& fsvd_at_t);

// ---- emulated experiment -----------------------------------------------------

// Desk-scale stand-in for the experimental fidelity table. Classical
// fidelity curves C(N, t, chi) are measured from truncated evolutions
// against a saturated-chi reference of the same scheme; the quantum decay
// surface F_q(N, t) uses the validated quasistatic-plus-Markovian law with
// per-site rates; table entries are F_q * C plus Gaussian sampling noise.
// Rows with chi_tilde above the censor threshold are dropped for large N at
// late t, imitating the regime where saturated simulations are unavailable.
struct EmulationConfig {
    std::vector<int> sizes = {8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18};
    double t_max = 8.0;
    double dt = 0.5;
    std::vector<int> chis = {2,  3,  4,  5,  6,  8,  10, 12, 16,  20, 24,
                             28, 32, 40, 48, 56, 64, 80, 96, 112, 128};
    int chi_ref = 160;
    int block_size = 6;
    double gamma_site = 0.004;   // Markovian rate per site per cycle
    double lambda_site = 3e-4;   // quasistatic rate per site per cycle^2
    double delta_miscal = 0.8;
    double sampling_sigma = 0.01;
    int censor_above_n = 15;      // strict: rows with N > this are censored
    double censor_above_t = 6.6;  // ... when also t > this
    double censor_chi_tilde = 2.0 / 3.0;
    double chi_tilde_keep_max = 1.1;  // drop deep-saturation duplicates
    uint64_t seed = 20260814;
};

struct EmulatedExperiment {
    std::vector<TrainingPoint> table;         // censored per the protocol
    std::vector<TrainingPoint> ground_truth;  // chi_tilde = 1 surface F_q(N, t)
    std::vector<ChiZeroPoint> chi_zero_grid;
};

// Quantum decay surface used by the generator.
double emulated_quantum_fidelity(const EmulationConfig& cfg, int n_sites,
                                 double t);

EmulatedExperiment emulate_experiment(const EmulationConfig& cfg);

}  // namespace rydbench
