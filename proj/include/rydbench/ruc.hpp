#pragma once

#include <cstdint>
#include <vector>

#include "rydbench/tensor3.hpp"

namespace rydbench {

// Brickwork random unitary circuit on an open chain of qubits.
//
// Layer r (1-indexed) applies independent Haar-random two-qubit gates on
// pairs (0,1), (2,3), ... when r is odd and (1,2), (3,4), ... when r is even.
// After each layer every qubit suffers a Pauli error with probability p_err
// (X, Y, Z equally likely), so the averaged channel is
// rho -> (1 - p) rho + (p/3) (X rho X + Y rho Y + Z rho Z) per qubit.
struct RucSpec {
    int n_qubits = 0;
    int depth = 0;
    double p_err = 0.0;

    int gates_in_layer(int layer) const;      // layer is 1-indexed
    int first_qubit_of_gate(int layer, int g) const;
};

// Haar two-qubit gate, deterministic in (seed, index).
Matrix haar_two_qubit(uint64_t seed, uint64_t index);

// 2x2 Pauli matrices, index 1=X, 2=Y, 3=Z.
Matrix pauli(int which);

struct PauliEvent {
    int layer = 0;  // noise round after this layer
    int qubit = 0;
    int which = 0;  // 1=X 2=Y 3=Z
};

// Ideal state of the circuit identified by circuit_seed, from |0...0>.
Vector run_ruc_dense(const RucSpec& spec, uint64_t circuit_seed);

// One noisy quantum trajectory of the same circuit. Pauli insertions are
// deterministic in (circuit_seed, trajectory); the sampled events can be
// returned through `events`.
Vector run_ruc_trajectory(const RucSpec& spec, uint64_t circuit_seed,
                          uint64_t trajectory, std::vector<PauliEvent>* events = nullptr);

// Monte Carlo estimates over noise trajectories of a single circuit:
//   fidelity = E_k |<ideal|traj_k>|^2
//   purity   = E_{k != k'} |<traj_k|traj_k'>|^2
// with standard errors of the means.
struct RucMonteCarlo {
    double fidelity = 0.0;
    double fidelity_err = 0.0;
    double purity = 0.0;
    double purity_err = 0.0;
    int n_trajectories = 0;
};
RucMonteCarlo ruc_monte_carlo(const RucSpec& spec, uint64_t circuit_seed,
                              int n_trajectories);

// Average the above over independently drawn circuits (seeds derived from
// `seed`), propagating scatter across circuits into the errors.
RucMonteCarlo ruc_circuit_average(const RucSpec& spec, uint64_t seed,
                                  int n_circuits, int n_trajectories);

}  // namespace rydbench
