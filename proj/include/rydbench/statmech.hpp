#pragma once

#include <vector>

namespace rydbench {

// Ising partition functions for circuit-averaged purity and fidelity of the
// brickwork random circuit with per-site Pauli errors (the ensemble sampled
// by ruc_monte_carlo in ruc.hpp).
//
// Averaging every two-qubit gate over the Haar measure reduces each gate to
// a single Ising spin: '+' for the identity pairing of the two state copies
// and '-' for the swap pairing. Both qubits of a gate carry its spin, so the
// spins form rows of width n_qubits, one row per layer, and consecutive rows
// are coupled by three-spin weights on downward-facing triangles:
//
//     row r:      s1  s2   .   .              spins after layer r
//                   \ /   \ /
//     layer r+1:   [gate] [gate]              gates of layer r+1 read the
//                   / \   / \                 pair below each of them
//     row r+1:     s3  s3  .   .              and write one new spin s3
//                                             onto both of their qubits
//
// The triangle weight W(s1, s2, s3; p) is the Weingarten contraction of the
// new gate with its two input legs, each leg dressed by one round of noise.
// Noise damps the swap component of a leg by a = 1 - p d^2/(d^2-1) per copy
// it touches: the fidelity network carries noise on one copy of the state,
// the purity network on both. The bottom row is fixed by the initial product
// state (which weights both spin values equally, so it is effectively free)
// and the top boundary is contracted against a pinned row of '-' spins.
//
// Brickwork edges make some legs skip a layer (idle qubits collect an extra
// noise round), so the edge triangles use the k-round dressing M^k rather
// than the single-round table entry; the bulk weight is statmech_triangle().

struct StatMechSpec {
    int n_qubits = 0;   // chain width N
    int depth = 0;      // number of brickwork layers
    double p = 0.0;     // per-site Pauli error probability, in [0, 1)
    int d = 2;          // local Hilbert space dimension

    int volume() const { return n_qubits * depth; }  // spacetime volume V = N t
    void validate() const;
};

enum class StatMechQuantity { purity, fidelity };

// Bulk three-spin Boltzmann weight W(s1, s2, s3; p) with spins +1 / -1.
double statmech_triangle(StatMechQuantity which, int s1, int s2, int s3,
                         double p, int d = 2);

// Partition function by row-to-row transfer over the 2^{n_qubits} spin rows.
// Supports n_qubits <= 16; equals the circuit-averaged purity or fidelity.
double statmech_partition(const StatMechSpec& spec, StatMechQuantity which);

// Same sum by direct enumeration of every gate-spin configuration. Only
// practical for narrow shallow lattices (n_qubits <= 6); kept as an
// independent check of the transfer contraction.
double statmech_enumerate(const StatMechSpec& spec, StatMechQuantity which);

// P/F^2 across an error-rate sweep on a fixed geometry. The bulk O(p) costs
// of purity and fidelity cancel in the ratio, so log(P/F^2) = C p^2 V with an
// O(1) constant C; the fit reports both the quadratic constant and the
// residual linear-in-p coefficient (which should be consistent with zero).
// The regression also carries a cubic nuisance term: the partition functions
// are polynomials in p, and without it the genuine O(p^3) curvature would
// leak into the linear coefficient over any finite sweep.
struct PurityFidelityRatio {
    std::vector<double> p;
    std::vector<double> ratio;        // P/F^2 at each p
    double c = 0.0;                   // fitted C in log ratio = C p^2 V
    double c_err = 0.0;
    double linear = 0.0;              // fitted coefficient of p V
    double linear_err = 0.0;
    double cubic = 0.0;               // fitted coefficient of p^3 V
    int volume = 0;
};
PurityFidelityRatio purity_fidelity_ratio(const StatMechSpec& geometry,
                                          const std::vector<double>& p_values);

}  // namespace rydbench
