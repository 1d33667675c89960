#include "rydbench/ruc.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/QR>

#include "rydbench/dense.hpp"
#include "rydbench/rng.hpp"

namespace rydbench {

namespace {
constexpr uint64_t kGateStream = 0x67617465;   // gate draws
constexpr uint64_t kNoiseStream = 0x6e6f6973;  // per-trajectory Pauli draws
}  // namespace

int RucSpec::gates_in_layer(int layer) const {
    if (layer < 1) throw std::invalid_argument("layers are 1-indexed");
    bool odd = (layer % 2 == 1);
    return odd ? n_qubits / 2 : (n_qubits - 1) / 2;
}

int RucSpec::first_qubit_of_gate(int layer, int g) const {
    bool odd = (layer % 2 == 1);
    return (odd ? 0 : 1) + 2 * g;
}

Matrix haar_two_qubit(uint64_t seed, uint64_t index) {
    auto rng = make_rng(seed, index);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix z(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) z(r, c) = cplx(g(rng), g(rng));

    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    Matrix rm = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < 4; ++j) {
        cplx d = rm(j, j);
        double a = std::abs(d);
        q.col(j) *= (a > 0.0) ? d / a : cplx(1.0, 0.0);
    }
    return q;
}

Matrix pauli(int which) {
    Matrix m = Matrix::Zero(2, 2);
    switch (which) {
        case 1: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
        case 2: m(0, 1) = cplx(0.0, -1.0); m(1, 0) = cplx(0.0, 1.0); break;
        case 3: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
        default: throw std::invalid_argument("pauli: index must be 1, 2 or 3");
    }
    return m;
}

namespace {

void validate(const RucSpec& spec) {
    if (spec.n_qubits < 2) throw std::invalid_argument("need at least 2 qubits");
    if (spec.n_qubits > 24) throw std::invalid_argument("dense circuit too large");
    if (spec.depth < 1) throw std::invalid_argument("depth must be >= 1");
    if (spec.p_err < 0.0 || spec.p_err > 1.0)
        throw std::invalid_argument("p_err must lie in [0, 1]");
}

Vector run_impl(const RucSpec& spec, uint64_t circuit_seed, bool noisy,
                uint64_t trajectory, std::vector<PauliEvent>* events) {
    validate(spec);
    Vector amp = Vector::Zero(Eigen::Index(1) << spec.n_qubits);
    amp(0) = 1.0;

    uint64_t gate_seed = stream_seed(circuit_seed, kGateStream);
    std::mt19937_64 noise_rng;
    if (noisy) noise_rng = make_rng(stream_seed(circuit_seed, kNoiseStream), trajectory);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> which_pauli(1, 3);

    for (int layer = 1; layer <= spec.depth; ++layer) {
        for (int g = 0; g < spec.gates_in_layer(layer); ++g) {
            int q0 = spec.first_qubit_of_gate(layer, g);
            Matrix u = haar_two_qubit(gate_seed,
                                      uint64_t(layer) * spec.n_qubits + q0);
            apply_block_dense(amp, u, spec.n_qubits, q0, 2);
        }
        if (!noisy) continue;
        for (int q = 0; q < spec.n_qubits; ++q) {
            if (unif(noise_rng) >= spec.p_err) continue;
            int w = which_pauli(noise_rng);
            apply_block_dense(amp, pauli(w), spec.n_qubits, q, 1);
            if (events) events->push_back({layer, q, w});
        }
    }
    return amp;
}

}  // namespace

Vector run_ruc_dense(const RucSpec& spec, uint64_t circuit_seed) {
    return run_impl(spec, circuit_seed, false, 0, nullptr);
}

Vector run_ruc_trajectory(const RucSpec& spec, uint64_t circuit_seed,
                          uint64_t trajectory, std::vector<PauliEvent>* events) {
    return run_impl(spec, circuit_seed, true, trajectory, events);
}

RucMonteCarlo ruc_monte_carlo(const RucSpec& spec, uint64_t circuit_seed,
                              int n_trajectories) {
    if (n_trajectories < 2)
        throw std::invalid_argument("need at least 2 trajectories");
    RucMonteCarlo out;
    out.n_trajectories = n_trajectories;

    Vector ideal = run_ruc_dense(spec, circuit_seed);

    // Fidelity: one sample per trajectory. Purity: one sample per disjoint
    // trajectory pair, which keeps the samples independent so plain standard
    // errors apply.
    double f_sum = 0.0, f_sq = 0.0;
    double p_sum = 0.0, p_sq = 0.0;
    int n_pairs = n_trajectories / 2;

    for (int k = 0; k < n_trajectories; k += 2) {
        Vector a = run_ruc_trajectory(spec, circuit_seed, uint64_t(k));
        double fa = std::norm(ideal.dot(a));
        f_sum += fa;
        f_sq += fa * fa;
        if (k + 1 >= n_trajectories) break;
        Vector b = run_ruc_trajectory(spec, circuit_seed, uint64_t(k) + 1);
        double fb = std::norm(ideal.dot(b));
        f_sum += fb;
        f_sq += fb * fb;
        double pv = std::norm(a.dot(b));
        p_sum += pv;
        p_sq += pv * pv;
    }

    int nf = n_trajectories;
    out.fidelity = f_sum / nf;
    out.fidelity_err = std::sqrt(std::max(0.0, f_sq / nf - out.fidelity * out.fidelity) /
                                 std::max(1, nf - 1));
    out.purity = p_sum / n_pairs;
    out.purity_err = std::sqrt(std::max(0.0, p_sq / n_pairs - out.purity * out.purity) /
                               std::max(1, n_pairs - 1));
    return out;
}

RucMonteCarlo ruc_circuit_average(const RucSpec& spec, uint64_t seed,
                                  int n_circuits, int n_trajectories) {
    if (n_circuits < 1) throw std::invalid_argument("need at least 1 circuit");
    if (n_circuits == 1)
        return ruc_monte_carlo(spec, stream_seed(seed, 0), n_trajectories);
    std::vector<double> f(n_circuits), p(n_circuits);
    for (int c = 0; c < n_circuits; ++c) {
        auto mc = ruc_monte_carlo(spec, stream_seed(seed, uint64_t(c)), n_trajectories);
        f[c] = mc.fidelity;
        p[c] = mc.purity;
    }
    auto mean_sem = [](const std::vector<double>& x, double& mean, double& sem) {
        double s = 0.0, sq = 0.0;
        for (double v : x) {
            s += v;
            sq += v * v;
        }
        int n = int(x.size());
        mean = s / n;
        double var = std::max(0.0, sq / n - mean * mean);
        sem = (n > 1) ? std::sqrt(var / (n - 1)) : 0.0;
    };
    RucMonteCarlo out;
    out.n_trajectories = n_trajectories;
    mean_sem(f, out.fidelity, out.fidelity_err);
    mean_sem(p, out.purity, out.purity_err);
    return out;
}

}  // namespace rydbench
