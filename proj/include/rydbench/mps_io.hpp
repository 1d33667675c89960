#pragma once

#include <cstdint>
#include <string>

#include "rydbench/mps.hpp"

namespace rydbench {

// Sidecar record stored as JSON next to a state snapshot.
struct SnapshotMeta {
    double time = 0.0;    // schedule time in cycles
    int chi = 0;          // bond cap in force when the snapshot was taken
    double f_svd = 1.0;   // cumulative truncation fidelity estimate
    uint64_t seed = 0;
};

// Binary MPS container.
//
// Layout: magic "MPS1", version u32, N u32, N-1 per-cut bond dims (u32),
// then one row-major complex-double tensor per site in (left, physical,
// right) order. Physical dimension is 2 throughout; boundary bonds have
// dimension 1 and are not stored. The writer moves the orthogonality center
// to site 0 first (exact QR sweeps), so files carry a fixed gauge and the
// reader can reconstruct the canonical structure without extra header
// fields.
void save_mps(const std::string& path, const Mps& state);
Mps load_mps(const std::string& path);

// Snapshot plus companion "<path>.json" metadata record.
void save_snapshot(const std::string& path, const Mps& state,
                   const SnapshotMeta& meta);

struct LoadedSnapshot {
    Mps state;
    SnapshotMeta meta;
};
LoadedSnapshot load_snapshot(const std::string& path);

// Dense complex matrix in the same container framing: magic "MPD1",
// version u32, rows u32, cols u32, row-major complex doubles. Vectors are
// stored as n x 1. Used for density matrices and dense state vectors.
void save_dense_matrix(const std::string& path, const Matrix& m);
Matrix load_dense_matrix(const std::string& path);

}  // namespace rydbench
