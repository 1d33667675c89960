#pragma once

#include <cstddef>
#include <vector>

#include "rydbench/mps.hpp"
#include "rydbench/tensor3.hpp"

namespace rydbench {

// Dense state-vector utilities. Everything here scales exponentially in the
// site count and exists to cross-check the tensor-network code on small
// systems, and to run exact reference dynamics where that is affordable.
//
// Basis convention: site 0 is the most significant bit, so the bitstring
// b_0 b_1 ... b_{n-1} read left to right is the binary index.

size_t bits_to_index(const std::vector<int>& bits);
std::vector<int> index_to_bits(size_t z, int n);

Vector to_dense(const Mps& psi);

// Exact MPS from a dense vector (successive splits, floor-level truncation
// only unless chi caps it).
Mps mps_from_dense(const Vector& amp, int n_sites, int chi);

// Apply a unitary on k contiguous sites starting at `first_site`.
// u is 2^k x 2^k in the same most-significant-first ordering.
void apply_block_dense(Vector& amp, const Matrix& u, int n_sites, int first_site, int k);

// Propagate |amp> under a Hamiltonian given in linear-frequency units for a
// time in cycles: exp(-i 2*pi*h*t) |amp>, by full Hermitian eigendecomposition.
Vector evolve_dense(const Matrix& h, const Vector& amp, double t);
Matrix expm_hermitian(const Matrix& h, cplx prefactor);  // exp(prefactor * h)

// Propagator for the same convention: exp(-i 2*pi*h*t).
Matrix propagator(const Matrix& h, double t);

// Schmidt values across cut (sites 0..cut | cut+1..n-1), descending,
// normalized to unit sum of squares.
std::vector<double> schmidt_values_dense(const Vector& amp, int n_sites, int cut);

Matrix density_matrix(const Vector& amp);

// Reduce onto the sites in `keep` (sorted ascending), tracing out the rest.
Matrix partial_trace(const Matrix& rho, int n_sites, const std::vector<int>& keep);

}  // namespace rydbench
