#include "rydbench/evolve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "rydbench/dense.hpp"
#include "rydbench/rng.hpp"

namespace rydbench {

// ============================================================
// Shared plumbing
// ============================================================

const Mps& Trajectory::final_mps() const {
    if (mps_snapshots.empty()) throw std::runtime_error("trajectory has no MPS snapshots");
    return mps_snapshots.back().state;
}

const Vector& Trajectory::final_dense() const {
    if (dense_snapshots.empty())
        throw std::runtime_error("trajectory has no dense snapshots");
    return dense_snapshots.back().amplitudes;
}

namespace {

using clock_type = std::chrono::steady_clock;

int effective_cutoff(const RydbergParams& p, const EvolverConfig& c) {
    return c.interaction_cutoff > 0 ? c.interaction_cutoff : p.interaction_cutoff;
}

// Number of dt steps and the set of step indices to snapshot.
int plan_steps(const Schedule& sched, double dt, std::set<int>& snap_steps) {
    if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
    if (sched.t_total < 0.0) throw std::invalid_argument("negative total time");
    int n_steps = int(std::llround(sched.t_total / dt));
    if (std::abs(n_steps * dt - sched.t_total) > 1e-6 * std::max(1.0, sched.t_total))
        throw std::invalid_argument("t_total must be a multiple of dt");
    snap_steps.clear();
    for (double t : sched.snapshot_times) {
        int k = int(std::llround(t / dt));
        if (k < 0 || k > n_steps)
            throw std::invalid_argument("snapshot time outside the schedule");
        snap_steps.insert(k);
    }
    snap_steps.insert(n_steps);
    return n_steps;
}

// out(l, p, r) = sum_q u(p, q) t(l, q, r)
Tensor3 apply_phys(const Matrix& u, const Tensor3& t) {
    const int dl = t.dim_left(), dp = t.dim_phys(), dr = t.dim_right();
    if (u.rows() != dp || u.cols() != dp)
        throw std::invalid_argument("apply_phys: dimension mismatch");
    using RowMajor =
        Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Tensor3 out(dl, dp, dr);
    for (int l = 0; l < dl; ++l) {
        Eigen::Map<const RowMajor> src(t.data() + size_t(l) * dp * dr, dp, dr);
        Eigen::Map<RowMajor> dst(out.data() + size_t(l) * dp * dr, dp, dr);
        dst = u * src;
    }
    return out;
}

void apply_diag_phase(const std::vector<cplx>& phase, Tensor3& t) {
    const int dl = t.dim_left(), dp = t.dim_phys(), dr = t.dim_right();
    if (int(phase.size()) != dp)
        throw std::invalid_argument("apply_diag_phase: dimension mismatch");
    for (int l = 0; l < dl; ++l)
        for (int p = 0; p < dp; ++p) {
            cplx* row = t.data() + (size_t(l) * dp + p) * dr;
            for (int r = 0; r < dr; ++r) row[r] *= phase[p];
        }
}

// Split the leftmost physical site off a fused tensor. `m` keeps the center
// (renormalized), `left` receives the left-canonical single-site tensor.
double split_left_site(Tensor3& m, Tensor3& left, int chi) {
    const int dl = m.dim_left(), dp = m.dim_phys(), dr = m.dim_right();
    const int rest = dp / 2;
    SvdSplit sp = svd_split(m.matrix_split(2, rest), chi);
    const int k = int(sp.values.size());
    left = Tensor3::from_matrix_lp_r(sp.u, dl, 2, k);

    double kept_abs = 0.0;
    for (double v : sp.values) kept_abs += v * v;
    double inv = 1.0 / std::sqrt(kept_abs);
    Matrix sv = sp.vdag;
    for (int j = 0; j < k; ++j) sv.row(j) *= sp.values[j] * inv;
    m = Tensor3::from_matrix_l_pr(sv, k, rest, dr);
    return sp.kept_weight;
}

// Mirror image: split the rightmost site off; `m` keeps the center.
double split_right_site(Tensor3& m, Tensor3& right, int chi) {
    const int dl = m.dim_left(), dp = m.dim_phys(), dr = m.dim_right();
    const int rest = dp / 2;
    SvdSplit sp = svd_split(m.matrix_split(rest, 2), chi);
    const int k = int(sp.values.size());
    right = Tensor3::from_matrix_l_pr(sp.vdag, k, 2, dr);

    double kept_abs = 0.0;
    for (double v : sp.values) kept_abs += v * v;
    double inv = 1.0 / std::sqrt(kept_abs);
    Matrix us = sp.u;
    for (int j = 0; j < k; ++j) us.col(j) *= sp.values[j] * inv;
    m = Tensor3::from_matrix_lp_r(us, dl, rest, k);
    return sp.kept_weight;
}

Matrix kron2(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

// ============================================================
// TEBD
// ============================================================

namespace {

// One 4x4 bond gate: the pair interaction plus the adjacent single-site
// terms, each interior site contributing half to either neighbouring gate.
Matrix tebd_bond_gate(const RydbergParams& p, int i, double tau) {
    const int n = p.n_sites;
    double wl = (i == 0) ? 1.0 : 0.5;
    double wr = (i + 1 == n - 1) ? 1.0 : 0.5;

    Matrix h = Matrix::Zero(4, 4);
    h(3, 3) += p.pair_coupling(1);
    // site i on the high bit, site i+1 on the low bit
    double oi = wl * p.rabi(i), oj = wr * p.rabi(i + 1);
    double di = wl * p.detuning(i), dj = wr * p.detuning(i + 1);
    h(0, 2) += 0.5 * oi; h(2, 0) += 0.5 * oi;
    h(1, 3) += 0.5 * oi; h(3, 1) += 0.5 * oi;
    h(0, 1) += 0.5 * oj; h(1, 0) += 0.5 * oj;
    h(2, 3) += 0.5 * oj; h(3, 2) += 0.5 * oj;
    h(2, 2) -= di; h(3, 3) -= di;
    h(1, 1) -= dj; h(3, 3) -= dj;
    return propagator(h, tau);
}

// Exact application of the commuting diagonal tail (pair distance >= 2):
// sweep a fused window left to right, multiplying in the phase of every pair
// as its right endpoint enters the window.
void apply_tail(Mps& psi, const RydbergParams& p, int cutoff, double dt,
                int chi, int step, long long& applications) {
    const int n = psi.n_sites();
    const int w = std::min(cutoff, n - 1);
    if (w < 2) return;

    psi.canonicalize(0);
    Tensor3 m = psi.tensor(0);
    for (int i = 1; i < w; ++i) m = merge(m, psi.tensor(i));

    // Pairs already inside the initial window [0, w-1].
    {
        std::vector<cplx> phase(size_t(1) << w);
        for (size_t z = 0; z < phase.size(); ++z) {
            double phi = 0.0;
            for (int a = 0; a < w; ++a)
                for (int b = a + 2; b < w; ++b)
                    if (((z >> (w - 1 - a)) & 1) && ((z >> (w - 1 - b)) & 1))
                        phi += p.pair_coupling(b - a);
            phase[z] = std::exp(cplx(0.0, -2.0 * M_PI * dt * phi));
        }
        apply_diag_phase(phase, m);
    }

    // Phase of all pairs (i-d, i) as site i enters the window; the incoming
    // site sits on the least significant bit, so the table is i-independent.
    std::vector<cplx> phase(size_t(1) << (w + 1));
    for (size_t z = 0; z < phase.size(); ++z) {
        double phi = 0.0;
        if (z & 1)
            for (int d = 2; d <= w; ++d)
                if ((z >> d) & 1) phi += p.pair_coupling(d);
        phase[z] = std::exp(cplx(0.0, -2.0 * M_PI * dt * phi));
    }
    for (int i = w; i < n; ++i) {
        m = merge(m, psi.tensor(i));
        apply_diag_phase(phase, m);
        Tensor3 left;
        double kept = split_left_site(m, left, chi);
        psi.replace_tensor(i - w, left);
        psi.ledger().record(step, kept);
        ++applications;
    }

    // Dissolve the window into single sites, leaving the center at the end.
    for (int j = 0; j < w - 1; ++j) {
        Tensor3 left;
        double kept = split_left_site(m, left, chi);
        psi.replace_tensor(n - w + j, left);
        psi.ledger().record(step, kept);
    }
    psi.replace_tensor(n - 1, m);
    psi.set_center_unchecked(n - 1);
}

double apply_two_site(Mps& psi, const Matrix& u4, int i, int chi, int step,
                      long long& applications) {
    psi.canonicalize(i);
    Tensor3 th = merge(psi.tensor(i), psi.tensor(i + 1));
    th = apply_phys(u4, th);
    Tensor3 left;
    double kept = split_left_site(th, left, chi);
    psi.replace_tensor(i, left);
    psi.replace_tensor(i + 1, th);
    psi.set_center_unchecked(i + 1);
    psi.ledger().record(step, kept);
    ++applications;
    return kept;
}

}  // namespace

Trajectory tebd_evolve(const Mps& state, const RydbergParams& params,
                       const Schedule& schedule, const EvolverConfig& config) {
    if (config.chi < 1) throw std::invalid_argument("chi must be >= 1");
    if (config.trotter_order != 2)
        throw std::invalid_argument("only second-order splitting is implemented");
    const int n = state.n_sites();
    if (n != params.n_sites) throw std::invalid_argument("site count mismatch");
    if (n < 2) throw std::invalid_argument("need at least 2 sites");

    RydbergParams p = params;
    p.interaction_cutoff = effective_cutoff(params, config);

    std::set<int> snap_steps;
    const int n_steps = plan_steps(schedule, config.dt, snap_steps);

    std::vector<Matrix> half_gate(n - 1);
    for (int i = 0; i < n - 1; ++i) half_gate[i] = tebd_bond_gate(p, i, 0.5 * config.dt);

    auto t0 = clock_type::now();
    Trajectory traj;
    Mps psi = state;

    auto snapshot = [&](int step) {
        MpsSnapshot snap{step * config.dt, psi, psi.ledger().svd_fidelity()};
        traj.mps_snapshots.push_back(std::move(snap));
    };

    auto odd_sweep = [&](int step) {
        for (int i = 0; i + 1 < n; i += 2)
            apply_two_site(psi, half_gate[i], i, config.chi, step,
                           traj.block_applications);
    };
    auto even_sweep = [&](int step) {
        int start = (n - 2) - (n - 2 + 1) % 2;  // largest odd bond index
        for (int i = start; i >= 1; i -= 2)
            apply_two_site(psi, half_gate[i], i, config.chi, step,
                           traj.block_applications);
    };

    if (snap_steps.count(0)) snapshot(0);
    for (int step = 1; step <= n_steps; ++step) {
        psi.set_ledger_step(step);
        odd_sweep(step);
        even_sweep(step);
        apply_tail(psi, p, p.interaction_cutoff, config.dt, config.chi, step,
                   traj.block_applications);
        even_sweep(step);
        odd_sweep(step);
        if (snap_steps.count(step)) snapshot(step);
    }

    traj.ledger = psi.ledger();
    traj.wall_seconds = std::chrono::duration<double>(clock_type::now() - t0).count();
    return traj;
}

// ============================================================
// Lightcone evolution with a fused center
// ============================================================

namespace {

struct LightconeOps {
    Matrix lead;              // forward block at the left edge, 2^L
    std::vector<Matrix> asc;  // s = 1..N-L: forward(s) * (backward(s) x I)
    Matrix turn;              // forward block at the right edge, 2^L
    std::vector<Matrix> desc; // s = N-L-1..1: forward(s) * (I x backward(s+1))
    Matrix b_first;           // lone backward block on sites [1, L-1], 2^(L-1)
};

LightconeOps build_lightcone_ops(const RydbergParams& p, int L, double dt,
                                 bool backward_as_forward) {
    const int n = p.n_sites;
    const double back = backward_as_forward ? 0.5 : -0.5;
    auto fwd = [&](int s, int len) {
        return propagator(block_hamiltonian(p, s, len), 0.5 * dt);
    };
    auto bwd = [&](int s, int len) {
        return propagator(block_hamiltonian(p, s, len), back * dt);
    };

    LightconeOps ops;
    ops.lead = fwd(0, L);
    if (L == n) return ops;  // decomposition collapses to lead applied twice

    Matrix id2 = Matrix::Identity(2, 2);
    ops.asc.reserve(n - L);
    for (int s = 1; s <= n - L; ++s)
        ops.asc.push_back(fwd(s, L) * kron2(bwd(s, L - 1), id2));
    ops.turn = fwd(n - L, L);
    for (int s = n - L - 1; s >= 1; --s)
        ops.desc.push_back(fwd(s, L) * kron2(id2, bwd(s + 1, L - 1)));
    ops.b_first = bwd(1, L - 1);
    return ops;
}

// MPS with sites [j, j+L-2] held as one fused center tensor.
struct FusedMps {
    std::vector<Tensor3> site;  // valid outside [j, j+L-2]
    Tensor3 m;
    int j = 0;
    int L = 2;
    TruncationLedger ledger;
    int step = 0;

    static FusedMps from_mps(const Mps& src, int L) {
        Mps work = src;
        work.canonicalize(0);
        FusedMps f;
        f.L = L;
        f.ledger = work.ledger();
        f.site.reserve(work.n_sites());
        for (int i = 0; i < work.n_sites(); ++i) f.site.push_back(work.tensor(i));
        f.m = f.site[0];
        for (int i = 1; i <= L - 2; ++i) f.m = merge(f.m, f.site[i]);
        f.j = 0;
        return f;
    }

    // absorb the B tensor to the right, apply, split an A tensor off the left
    void window_right(const Matrix& op, int chi) {
        m = merge(m, site[j + L - 1]);
        m = apply_phys(op, m);
        Tensor3 left;
        double kept = split_left_site(m, left, chi);
        site[j] = std::move(left);
        ledger.record(step, kept);
        ++j;
    }

    // absorb the A tensor to the left, apply, split a B tensor off the right
    void window_left(const Matrix& op, int chi) {
        --j;
        m = merge(site[j], m);
        m = apply_phys(op, m);
        Tensor3 right;
        double kept = split_right_site(m, right, chi);
        site[j + L - 1] = std::move(right);
        ledger.record(step, kept);
    }

    // materialize a plain MPS (center at site 0); the splits needed to
    // dissolve the fused tensor are recorded in the returned state's ledger
    Mps to_mps(int chi) const {
        if (j != 0) throw std::runtime_error("fused center not at the left edge");
        TruncationLedger led = ledger;
        std::vector<Tensor3> out(site.size());
        for (size_t i = 0; i < site.size(); ++i) out[i] = site[i];
        Tensor3 work = m;
        for (int k = L - 2; k >= 1; --k) {
            Tensor3 right;
            double kept = split_right_site(work, right, chi);
            out[k] = std::move(right);
            led.record(step, kept);
        }
        out[0] = std::move(work);
        Mps psi = Mps::from_tensors(std::move(out), 0);
        psi.ledger() = std::move(led);
        return psi;
    }
};

}  // namespace

Trajectory lightcone_evolve(const Mps& state, const RydbergParams& params,
                            const Schedule& schedule, const EvolverConfig& config) {
    if (config.chi < 1) throw std::invalid_argument("chi must be >= 1");
    const int n = state.n_sites();
    const int L = config.block_size;
    if (n != params.n_sites) throw std::invalid_argument("site count mismatch");
    if (L < 2) throw std::invalid_argument("block size must be >= 2");
    if (L > n) throw std::invalid_argument("block size exceeds the chain");

    RydbergParams p = params;
    p.interaction_cutoff = effective_cutoff(params, config);
    if (L < p.interaction_cutoff + 1)
        throw std::invalid_argument("block size must exceed the interaction cutoff");

    std::set<int> snap_steps;
    const int n_steps = plan_steps(schedule, config.dt, snap_steps);

    LightconeOps ops = build_lightcone_ops(p, L, config.dt,
                                           config.debug_backward_as_forward);

    auto t0 = clock_type::now();
    Trajectory traj;
    FusedMps f = FusedMps::from_mps(state, L);

    auto snapshot = [&](int step) {
        MpsSnapshot snap{step * config.dt, f.to_mps(config.chi), 1.0};
        snap.f_svd = snap.state.ledger().svd_fidelity();
        traj.mps_snapshots.push_back(std::move(snap));
    };

    if (snap_steps.count(0)) snapshot(0);
    for (int step = 1; step <= n_steps; ++step) {
        f.step = step;
        if (L == n) {
            // Lone block: forward half-steps back to back, no sweep.
            f.m = merge(f.m, f.site[n - 1]);
            f.m = apply_phys(ops.lead, f.m);
            f.m = apply_phys(ops.lead, f.m);
            Tensor3 right;
            double kept = split_right_site(f.m, right, config.chi);
            f.site[n - 1] = std::move(right);
            f.ledger.record(step, kept);
            traj.block_applications += 2;
        } else {
            f.window_right(ops.lead, config.chi);
            for (const Matrix& g : ops.asc) f.window_right(g, config.chi);
            f.window_left(ops.turn, config.chi);
            for (const Matrix& g : ops.desc) f.window_left(g, config.chi);
            f.m = apply_phys(ops.b_first, f.m);
            f.window_left(ops.lead, config.chi);
            traj.block_applications += 2 * (n - L) + 3;
        }
        if (snap_steps.count(step)) snapshot(step);
    }

    traj.ledger = f.ledger;
    traj.wall_seconds = std::chrono::duration<double>(clock_type::now() - t0).count();
    return traj;
}

// ============================================================
// Dense reference and stochastic trajectories
// ============================================================

Trajectory dense_trajectory(const Vector& state, const RydbergParams& params,
                            const Schedule& schedule) {
    if (params.n_sites > 14)
        throw std::invalid_argument("dense evolution limited to 14 sites");
    if (state.size() != (Eigen::Index(1) << params.n_sites))
        throw std::invalid_argument("state dimension mismatch");

    auto t0 = clock_type::now();
    Eigen::SelfAdjointEigenSolver<Matrix> es(full_hamiltonian(params));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("dense_trajectory: eigendecomposition failed");
    Vector coeff0 = es.eigenvectors().adjoint() * state;

    std::vector<double> times = schedule.snapshot_times;
    times.push_back(schedule.t_total);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    Trajectory traj;
    for (double t : times) {
        if (t < 0.0 || t > schedule.t_total + 1e-12)
            throw std::invalid_argument("snapshot time outside the schedule");
        Vector coeff = coeff0;
        for (Eigen::Index i = 0; i < coeff.size(); ++i)
            coeff(i) *= std::exp(cplx(0.0, -2.0 * M_PI * es.eigenvalues()(i) * t));
        traj.dense_snapshots.push_back({t, es.eigenvectors() * coeff});
    }
    traj.wall_seconds = std::chrono::duration<double>(clock_type::now() - t0).count();
    return traj;
}

std::vector<Trajectory> noisy_rydberg_trajectories(const Vector& state,
                                                   const RydbergParams& params,
                                                   const Schedule& schedule,
                                                   const NoiseModel& noise,
                                                   int n_trajectories) {
    if (n_trajectories < 1) throw std::invalid_argument("need at least 1 trajectory");
    if (noise.sigma_rel < 0.0) throw std::invalid_argument("sigma_rel must be >= 0");
    if (noise.kind == NoiseKind::pauli_local || noise.kind == NoiseKind::combined)
        throw std::invalid_argument("Pauli noise applies to the circuit model");

    std::vector<Trajectory> out;
    out.reserve(n_trajectories);
    for (int k = 0; k < n_trajectories; ++k) {
        RydbergParams pk = params;
        if (noise.kind == NoiseKind::rabi_shot_to_shot) {
            auto rng = make_rng(noise.seed, uint64_t(k));
            std::normal_distribution<double> g(params.omega,
                                               noise.sigma_rel * params.omega);
            pk.omega = g(rng);
        }
        Trajectory traj = dense_trajectory(state, pk, schedule);
        traj.realized_params.emplace_back("omega", pk.omega);
        out.push_back(std::move(traj));
    }
    return out;
}

std::vector<Trajectory> noisy_ruc_trajectories(const RucSpec& spec,
                                               const NoiseModel& noise,
                                               int n_trajectories) {
    if (n_trajectories < 1) throw std::invalid_argument("need at least 1 trajectory");
    if (noise.kind != NoiseKind::pauli_local && noise.kind != NoiseKind::none)
        throw std::invalid_argument("circuit noise must be pauli_local or none");
    if (noise.p_err < 0.0 || noise.p_err > 1.0)
        throw std::invalid_argument("p_err must lie in [0, 1]");

    RucSpec s = spec;
    s.p_err = (noise.kind == NoiseKind::pauli_local) ? noise.p_err : 0.0;

    std::vector<Trajectory> out;
    out.reserve(n_trajectories);
    for (int k = 0; k < n_trajectories; ++k) {
        auto t0 = clock_type::now();
        std::vector<PauliEvent> events;
        Vector amp = run_ruc_trajectory(s, noise.seed, uint64_t(k), &events);
        Trajectory traj;
        traj.dense_snapshots.push_back({double(s.depth), std::move(amp)});
        traj.realized_params.emplace_back("n_pauli_events", double(events.size()));
        traj.wall_seconds =
            std::chrono::duration<double>(clock_type::now() - t0).count();
        out.push_back(std::move(traj));
    }
    return out;
}

Matrix density_matrix(const std::vector<Trajectory>& trajectories) {
    if (trajectories.empty()) throw std::invalid_argument("no trajectories");
    return density_matrix_at(trajectories,
                             trajectories.front().dense_snapshots.size() - 1);
}

Matrix density_matrix_at(const std::vector<Trajectory>& trajectories, size_t snap) {
    if (trajectories.empty()) throw std::invalid_argument("no trajectories");
    Matrix rho;
    for (const Trajectory& t : trajectories) {
        if (snap >= t.dense_snapshots.size())
            throw std::invalid_argument("snapshot index out of range");
        const Vector& amp = t.dense_snapshots[snap].amplitudes;
        if (rho.size() == 0) rho = Matrix::Zero(amp.size(), amp.size());
        rho += amp * amp.adjoint();
    }
    rho /= double(trajectories.size());
    double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > 1e-8)
        throw std::runtime_error("density matrix trace deviates from 1");
    return rho;
}

}  // namespace rydbench
