#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rydbench/mps.hpp"
#include "rydbench/ruc.hpp"
#include "rydbench/rydberg.hpp"
#include "rydbench/tensor3.hpp"

namespace rydbench {

enum class Algorithm { tebd, lightcone, dense };

struct EvolverConfig {
    Algorithm algorithm = Algorithm::lightcone;
    int chi = 512;
    double dt = 0.5;            // cycles per step
    int block_size = 6;         // L, lightcone only
    int trotter_order = 2;      // tebd; only 2 is implemented
    int interaction_cutoff = 0; // 0 = inherit from the params

    // Test hook: replace the backward (+H) half-steps by forward ones. The
    // decomposition is then wrong by construction and agreement with the
    // exact dynamics must collapse.
    bool debug_backward_as_forward = false;
};

enum class NoiseKind { none, pauli_local, rabi_shot_to_shot, combined };

struct NoiseModel {
    NoiseKind kind = NoiseKind::none;
    double p_err = 0.0;      // per-qubit per-layer Pauli probability
    double sigma_rel = 0.0;  // relative shot-to-shot Rabi spread
    uint64_t seed = 0;
};

// Times are in cycles. Snapshot requests snap to the step grid; the final
// time is always recorded.
struct Schedule {
    double t_total = 0.0;
    std::vector<double> snapshot_times;
};

struct MpsSnapshot {
    double t = 0.0;
    Mps state;
    double f_svd = 1.0;  // cumulative at snapshot time
};

struct DenseSnapshot {
    double t = 0.0;
    Vector amplitudes;
};

struct Trajectory {
    std::vector<MpsSnapshot> mps_snapshots;
    std::vector<DenseSnapshot> dense_snapshots;
    TruncationLedger ledger;
    std::vector<std::pair<std::string, double>> realized_params;
    long long block_applications = 0;
    double wall_seconds = 0.0;

    const Mps& final_mps() const;
    const Vector& final_dense() const;
};

// Second-order Trotterized evolution: per step, half-steps of the odd and
// even nearest-neighbour gate groups sandwich one exact application of the
// commuting diagonal interaction tail (distance >= 2), palindromically:
// odd(dt/2) even(dt/2) tail(dt) even(dt/2) odd(dt/2). Single-site terms are
// folded into the nearest-neighbour gates, split evenly between the two gates
// touching each interior site.
Trajectory tebd_evolve(const Mps& state, const RydbergParams& params,
                       const Schedule& schedule, const EvolverConfig& config);

// Block-decomposed evolution with large dt: forward blocks of L sites at
// -dt/2 and backward blocks of L-1 sites at +dt/2, swept left to right and
// back once per step, with forward/backward neighbours fused into single
// applied operators. The state carries an (L-1)-site fused center tensor
// between steps. Exactly 2(N-L)+3 fused operators per step for L < N.
Trajectory lightcone_evolve(const Mps& state, const RydbergParams& params,
                            const Schedule& schedule, const EvolverConfig& config);

// Exact reference dynamics (eigendecomposition; no step error).
Trajectory dense_trajectory(const Vector& state, const RydbergParams& params,
                            const Schedule& schedule);

// Stochastic trajectories. The Rydberg route supports rabi_shot_to_shot
// (per-trajectory Omega drawn once and held fixed); the circuit route
// supports pauli_local. Trajectory k is deterministic in (noise.seed, k).
std::vector<Trajectory> noisy_rydberg_trajectories(const Vector& state,
                                                   const RydbergParams& params,
                                                   const Schedule& schedule,
                                                   const NoiseModel& noise,
                                                   int n_trajectories);
std::vector<Trajectory> noisy_ruc_trajectories(const RucSpec& spec,
                                               const NoiseModel& noise,
                                               int n_trajectories);

// Equal-weight mixture of the final dense snapshots.
Matrix density_matrix(const std::vector<Trajectory>& trajectories);
// Same at snapshot index `snap` of each trajectory.
Matrix density_matrix_at(const std::vector<Trajectory>& trajectories, size_t snap);

}  // namespace rydbench
