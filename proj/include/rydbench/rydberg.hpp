#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rydbench/tensor3.hpp"

namespace rydbench {

// Chain of two-level atoms driven between ground |0> and Rydberg |1>:
//
//   H / h = omega * sum_i Sx_i - sum_i delta_i n_i
//           + blockade * sum_{i<j, j-i<=cutoff} n_i n_j / (j-i)^6
//
// with Sx = sigma_x / 2 and n = |1><1|. Energies are linear frequencies in
// units of omega; time is measured in Rabi cycles (one cycle = 1/omega), so
// the propagator over t cycles is exp(-i 2*pi*H*t).
//
// Site-dependent drive and detuning enter as affine profiles,
//   omega_i = omega * (1 + omega_slope * i),   delta_i = delta + delta_slope * i,
// which covers the calibration-gradient use case without a full per-site table.
struct RydbergParams {
    int n_sites = 0;
    double omega = 1.0;
    double omega_slope = 0.0;
    double delta = 0.0;
    double delta_slope = 0.0;
    double blockade = 13.0;      // nearest-neighbour interaction, units of omega
    int interaction_cutoff = 5;  // longest included pair distance

    double pair_coupling(int distance) const;  // blockade / distance^6, 0 past cutoff
    double rabi(int site) const;
    double detuning(int site) const;

    std::string to_json() const;
    static RydbergParams from_json(const std::string& text);
};

// Hamiltonian restricted to the contiguous block [first, first + width):
// all single-site terms for block sites plus every pair term internal to the
// block. Basis ordering puts the first block site in the most significant bit.
Matrix block_hamiltonian(const RydbergParams& p, int first, int width);

inline Matrix full_hamiltonian(const RydbergParams& p) {
    return block_hamiltonian(p, 0, p.n_sites);
}

// Nearest-neighbour blockade constraint (no adjacent Rydberg pair).
bool is_blockaded(const std::vector<int>& bits);
int blockade_violations(const std::vector<int>& bits);

// Number of blockade-satisfying strings on n sites: Fibonacci(n + 2).
uint64_t blockade_dimension(int n_sites);

// All basis indices (site 0 = most significant bit) satisfying the constraint.
std::vector<size_t> blockaded_indices(int n_sites);

// Conversions used when quoting circuit-depth equivalents of quench times:
// one entangling unit of bipartite growth takes about 0.83 cycles, and one
// brickwork layer of random two-qubit gates generates about 1/1.1 of it.
constexpr double cycles_per_ebit = 0.83;
constexpr double ruc_layers_per_ebit = 1.1;

}  // namespace rydbench
