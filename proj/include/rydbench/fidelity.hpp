#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rydbench/mps.hpp"

namespace rydbench {

// Fidelity benchmarking from measured bitstrings. The estimator compares the
// empirical distribution of measured strings against a classically computed
// reference distribution p(z) and a time-averaged background p_avg(z):
//
//     F_d = 2 * (mean_m p(z_m) / p_avg(z_m)) / (sum_z p(z)^2 / p_avg(z)) - 1
//
// The normalizing sum in the denominator is never enumerated; it is estimated
// by importance sampling from p itself, E_{z~p}[p(z)/p_avg(z)].

// ============================================================================
// Measured data
// ============================================================================

// One group of shots taken at a single evolution time. Small systems are
// often measured as several non-interacting subarrays ("islands"); each
// island becomes its own dataset and the per-island estimates are combined
// with island_average().
struct BitstringDataset {
    std::vector<std::vector<int>> bitstrings;
    std::string island;
    double time = 0.0;  // cycles

    size_t shots() const { return bitstrings.size(); }
    int n_sites() const;
};

// File format: one ASCII line of '0'/'1' per shot. A line starting with '#'
// opens a new group and may carry `island=<tag>` and `t=<cycles>` fields.
std::vector<BitstringDataset> load_bitstrings(const std::string& path);
void save_bitstrings(const std::string& path, const std::vector<BitstringDataset>& sets);

// ============================================================================
// Probability providers
// ============================================================================

// p(z) backed by an MPS snapshot or a dense state vector, with the metadata
// needed for averaging windows. Cheap to copy.
class ProbabilityModel {
public:
    static ProbabilityModel from_mps(Mps psi, double time, double f_svd);
    static ProbabilityModel from_dense(Vector amp, int n_sites, double time, double f_svd);

    int n_sites() const { return n_sites_; }
    double time() const { return time_; }
    double f_svd() const { return f_svd_; }
    int max_bond_dim() const;  // 0 when dense-backed

    double probability(const std::vector<int>& bits) const;
    std::vector<std::vector<int>> sample(int shots, uint64_t seed) const;

    // Total probability of the nearest-neighbor-blockade-satisfying sector.
    double blockade_weight() const;

private:
    ProbabilityModel() = default;
    std::shared_ptr<const Mps> mps_;
    std::shared_ptr<const Vector> dense_;
    int n_sites_ = 0;
    double time_ = 0.0;
    double f_svd_ = 1.0;
};

// Weighted mixture p_avg(z) = sum_j w_j p_j(z) with sum_j w_j = 1.
class AveragedModel {
public:
    AveragedModel(std::vector<ProbabilityModel> models, std::vector<double> weights);

    double p_avg(const std::vector<int>& bits) const;
    double blockade_weight() const;
    int n_sites() const;
    size_t n_models() const { return models_.size(); }
    const std::vector<double>& weights() const { return weights_; }

private:
    std::vector<ProbabilityModel> models_;
    std::vector<double> weights_;
};

// Default averaging window, expressed in cycles via t_cycle = 145 ns: the
// window spans +-1.4 us around the experiment time and the reference grid
// step is roughly 28 ns, so about a hundred snapshots contribute.
constexpr double cycles_per_microsecond = 1.0 / 0.145;
constexpr double default_window_half_width = 1.4 * cycles_per_microsecond;
constexpr double default_window_step = 0.028 * cycles_per_microsecond;

// Snapshot grid covering the window around t_center, clamped to
// [t_min, t_max], sorted ascending. Handy for planning evolution schedules.
std::vector<double> averaging_grid(double t_center, double t_min, double t_max,
                                   double half_width = default_window_half_width,
                                   double step = default_window_step);

// Select the models inside the window and weight them by similarity of
// truncation fidelity to the model nearest t_center:
//     w_j = min(F_svd(ref) / F_svd(j), F_svd(j) / F_svd(ref)).
// Averaging snapshots of very different classical accuracy would degrade
// p_avg, so dissimilar snapshots are de-emphasized.
AveragedModel build_p_avg(const std::vector<ProbabilityModel>& models, double t_center,
                          double half_width = default_window_half_width);

// ============================================================================
// Estimates
// ============================================================================

struct FidelityEstimate {
    double value = 0.0;
    double sigma = 0.0;
    double numerator = 0.0;        // mean of p/p_avg over measured strings
    double numerator_sigma = 0.0;
    double denominator = 0.0;      // importance-sampled sum_z p^2/p_avg
    double denominator_sigma = 0.0;
    size_t shots = 0;              // measured strings used (after any sector cut)
    size_t denominator_shots = 0;  // importance-sampling draws used
    bool blockaded = false;
    double b_exp = 1.0;  // blockaded fraction of the measured strings
    double b_thy = 1.0;  // blockaded weight of the model
    std::string island;
    double time = 0.0;

    std::string text_record() const;
};

// Rescaled probabilities x_m = p(z_m)/p_avg(z_m) for every measured string.
// A measured string with p_avg = 0 is a hard error (regularizing it would
// bias the estimator in uncontrolled ways) and is reported verbatim.
std::vector<double> rescaled_probabilities(const BitstringDataset& data,
                                           const ProbabilityModel& p,
                                           const AveragedModel& pavg);

// Statistical error of a sample mean: sqrt((E[x^2] - E[x]^2) / m). The same
// formula serves both sides of the estimator; their errors are then
// propagated through the ratio and the affine map onto F_d. Passing m = 0
// uses the sample count.
double fd_error(const std::vector<double>& rescaled, size_t m = 0);

// Full-space estimator. denom_shots = 0 picks 10x the measured shot count so
// the experimental sampling error dominates; explicit values below 1000 are
// rejected.
FidelityEstimate estimate_fd(const BitstringDataset& data, const ProbabilityModel& p,
                             const AveragedModel& pavg, size_t denom_shots = 0,
                             uint64_t seed = 1);

// Blockade-sector estimator F_{d,s=0}: restrict both sides to strings with
// no adjacent excitations, renormalize p and p_avg by their sector weights,
// and scale the result by B_thy * B_exp. More robust when truncation damages
// the violating sectors first.
FidelityEstimate estimate_fd_blockaded(const BitstringDataset& data, const ProbabilityModel& p,
                                       const AveragedModel& pavg, size_t denom_shots = 0,
                                       uint64_t seed = 1);

// Shot-count-weighted combination of per-island estimates; sigmas combine in
// quadrature with the same weights.
FidelityEstimate island_average(const std::vector<FidelityEstimate>& per_island);

// Sample complexity A such that the statistical error scales as A/sqrt(M),
// measured near F_d = 0.5:
//     A = sum_t sigma_t sqrt(M_t) w_t / sum_t w_t,  w_t = 1/|F_d - 0.5|,
// with the weight capped so a single point arbitrarily close to 0.5 cannot
// dominate the average.
constexpr double complexity_weight_cap = 1e3;
double sample_complexity(const std::vector<FidelityEstimate>& per_time);

// ============================================================================
// Diagnostics
// ============================================================================

// The estimator assumes the rescaled probabilities p/p_avg of an ergodic
// state follow the exponential (Porter-Thomas) law. This reports how far the
// empirical ratio distribution sits from that law as Kolmogorov-Smirnov
// distances, so consumers can gate on it. Ratios of background-drawn strings
// (measured data, decohered) are compared against Exp(1); ratios of strings
// drawn from p itself are size-biased and compared against Gamma(2,1).
struct PorterThomasReport {
    size_t n = 0;
    double mean = 0.0;
    double ks_exponential = 0.0;  // vs CDF 1 - e^-x
    double ks_size_biased = 0.0;  // vs CDF 1 - (1+x) e^-x
};
PorterThomasReport porter_thomas_report(std::vector<double> ratios);

// Plain linear cross-entropy benchmark, for comparison only:
//     F_XEB = 2^N * mean_m p(z_m) - 1.
double linear_xeb(const BitstringDataset& data, const ProbabilityModel& p);

}  // namespace rydbench
