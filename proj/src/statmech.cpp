#include "rydbench/statmech.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "rydbench/fit.hpp"
#include "rydbench/ruc.hpp"

namespace rydbench {

void StatMechSpec::validate() const {
    if (n_qubits < 2) throw std::invalid_argument("statmech: need at least 2 qubits");
    if (depth < 1) throw std::invalid_argument("statmech: depth must be >= 1");
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("statmech: p must lie in [0, 1)");
    if (d < 2) throw std::invalid_argument("statmech: local dimension must be >= 2");
}

namespace {

double ipow(double base, int k) {
    double out = 1.0;
    for (int i = 0; i < k; ++i) out *= base;
    return out;
}

// Per-leg overlaps and Weingarten constants for one choice of quantity.
// `damp` is the swap-damping per noise round: a per copy the noise touches,
// with a = 1 - p d^2/(d^2-1) the Pauli-error depolarization factor.
struct WeightContext {
    double d = 2.0;
    double q = 4.0;  // gate dimension d^2
    double wg_same = 0.0;
    double wg_diff = 0.0;
    double damp = 1.0;

    WeightContext(double p, int dim, StatMechQuantity which) {
        d = double(dim);
        q = d * d;
        wg_same = 1.0 / (q * q - 1.0);
        wg_diff = -1.0 / (q * (q * q - 1.0));
        double a = 1.0 - p * q / (q - 1.0);
        damp = (which == StatMechQuantity::fidelity) ? a : a * a;
    }

    // <<tau | T^k | sigma>> for a leg sourced by a gate with spin sigma that
    // crossed k noise rounds. Trace preservation fixes the tau = '+' row.
    double leg(int tau, int sigma, int k) const {
        if (sigma > 0) return tau > 0 ? q : d;
        if (tau > 0) return d;
        return (q - 1.0) * ipow(damp, k) + 1.0;
    }

    // Same overlap for a leg still attached to the initial product state.
    double init_leg(int tau, int k) const {
        if (tau > 0) return 1.0;
        return (1.0 + (d - 1.0) * ipow(damp, k)) / d;
    }

    // Sum over the gate's internal Weingarten label given the two input-leg
    // overlaps evaluated at label '+' and '-'.
    double gate_weight(int sigma, double left_plus, double left_minus,
                       double right_plus, double right_minus) const {
        double at_plus = left_plus * right_plus;
        double at_minus = left_minus * right_minus;
        return sigma > 0 ? wg_same * at_plus + wg_diff * at_minus
                         : wg_same * at_minus + wg_diff * at_plus;
    }
};

void check_spin(int s) {
    if (s != 1 && s != -1) throw std::invalid_argument("statmech: spins must be +1 or -1");
}

}  // namespace

double statmech_triangle(StatMechQuantity which, int s1, int s2, int s3,
                         double p, int d) {
    check_spin(s1);
    check_spin(s2);
    check_spin(s3);
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("statmech: p must lie in [0, 1)");
    if (d < 2) throw std::invalid_argument("statmech: local dimension must be >= 2");
    WeightContext ctx(p, d, which);
    return ctx.gate_weight(s3, ctx.leg(+1, s1, 1), ctx.leg(-1, s1, 1),
                           ctx.leg(+1, s2, 1), ctx.leg(-1, s2, 1));
}

double statmech_partition(const StatMechSpec& spec, StatMechQuantity which) {
    spec.validate();
    if (spec.n_qubits > 16)
        throw std::invalid_argument("statmech: transfer contraction supports width <= 16");

    WeightContext ctx(spec.p, spec.d, which);
    RucSpec lattice;
    lattice.n_qubits = spec.n_qubits;
    lattice.depth = spec.depth;

    int n = spec.n_qubits;
    size_t dim = size_t(1) << n;
    // state[c] sums all processed-gate assignments whose exposed row matches
    // config c; bit j of c set means site j carries a swap ('-') spin.
    std::vector<double> state(dim, 0.0), next(dim, 0.0);
    state[0] = 1.0;
    std::vector<int> last(size_t(n), 0);  // layer of the last gate per site, 0 = none yet

    for (int layer = 1; layer <= spec.depth; ++layer) {
        for (int g = 0; g < lattice.gates_in_layer(layer); ++g) {
            int i = lattice.first_qubit_of_gate(layer, g);
            // Input-leg overlaps at Weingarten label '+'/'-' for each source
            // spin value of the two consumed sites.
            double f_plus[2][2], f_minus[2][2];  // [site offset][source bit]
            for (int o = 0; o < 2; ++o) {
                int site = i + o;
                if (last[site] == 0) {
                    double fp = ctx.init_leg(+1, layer - 1);
                    double fm = ctx.init_leg(-1, layer - 1);
                    f_plus[o][0] = f_plus[o][1] = fp;
                    f_minus[o][0] = f_minus[o][1] = fm;
                } else {
                    int k = layer - last[site];
                    f_plus[o][0] = ctx.leg(+1, +1, k);
                    f_minus[o][0] = ctx.leg(-1, +1, k);
                    f_plus[o][1] = ctx.leg(+1, -1, k);
                    f_minus[o][1] = ctx.leg(-1, -1, k);
                }
            }
            size_t mask = (size_t(1) << i) | (size_t(1) << (i + 1));
            std::fill(next.begin(), next.end(), 0.0);
            for (size_t c = 0; c < dim; ++c) {
                double amp = state[c];
                if (amp == 0.0) continue;
                int bl = int((c >> i) & 1);
                int br = int((c >> (i + 1)) & 1);
                double w_plus = ctx.gate_weight(+1, f_plus[0][bl], f_minus[0][bl],
                                                f_plus[1][br], f_minus[1][br]);
                double w_minus = ctx.gate_weight(-1, f_plus[0][bl], f_minus[0][bl],
                                                 f_plus[1][br], f_minus[1][br]);
                next[c & ~mask] += w_plus * amp;
                next[c | mask] += w_minus * amp;
            }
            state.swap(next);
            last[size_t(i)] = layer;
            last[size_t(i) + 1] = layer;
        }
    }

    // Contract the exposed row against the pinned '-' top boundary, with the
    // trailing noise rounds folded into each site's final leg.
    double total = 0.0;
    for (size_t c = 0; c < dim; ++c) {
        double amp = state[c];
        if (amp == 0.0) continue;
        double w = 1.0;
        for (int j = 0; j < n; ++j) {
            if (last[size_t(j)] == 0) {
                w *= ctx.init_leg(-1, spec.depth);
            } else {
                int k = spec.depth - last[size_t(j)] + 1;
                w *= ctx.leg(-1, ((c >> j) & 1) ? -1 : +1, k);
            }
        }
        total += w * amp;
    }
    return total;
}

double statmech_enumerate(const StatMechSpec& spec, StatMechQuantity which) {
    spec.validate();
    if (spec.n_qubits > 6)
        throw std::invalid_argument("statmech: enumeration supports width <= 6");

    WeightContext ctx(spec.p, spec.d, which);
    RucSpec lattice;
    lattice.n_qubits = spec.n_qubits;
    lattice.depth = spec.depth;

    // Flatten the lattice: per gate, record where each input leg comes from
    // (index of an earlier gate, or -1 for the initial state) and how many
    // noise rounds it crossed; per site, the gate feeding the top boundary.
    struct Leg {
        int source = -1;
        int rounds = 0;
    };
    struct Gate {
        Leg in[2];
    };
    std::vector<Gate> gates;
    std::vector<int> owner(size_t(spec.n_qubits), -1);  // last gate per site
    std::vector<int> owner_layer(size_t(spec.n_qubits), 0);
    for (int layer = 1; layer <= spec.depth; ++layer) {
        for (int g = 0; g < lattice.gates_in_layer(layer); ++g) {
            int i = lattice.first_qubit_of_gate(layer, g);
            Gate gate;
            for (int o = 0; o < 2; ++o) {
                int site = i + o;
                gate.in[o].source = owner[size_t(site)];
                gate.in[o].rounds = owner[size_t(site)] < 0
                                        ? layer - 1
                                        : layer - owner_layer[size_t(site)];
            }
            int id = int(gates.size());
            gates.push_back(gate);
            owner[size_t(i)] = id;
            owner[size_t(i) + 1] = id;
            owner_layer[size_t(i)] = layer;
            owner_layer[size_t(i) + 1] = layer;
        }
    }
    if (gates.size() > 30)
        throw std::invalid_argument("statmech: lattice too large to enumerate");

    double total = 0.0;
    size_t n_configs = size_t(1) << gates.size();
    for (size_t cfg = 0; cfg < n_configs; ++cfg) {
        auto spin_of = [&](int id) { return ((cfg >> id) & 1) ? -1 : +1; };
        double w = 1.0;
        for (size_t gi = 0; gi < gates.size(); ++gi) {
            double f[2][2];  // [leg][label index 0='+'/1='-']
            for (int o = 0; o < 2; ++o) {
                const Leg& leg = gates[gi].in[o];
                if (leg.source < 0) {
                    f[o][0] = ctx.init_leg(+1, leg.rounds);
                    f[o][1] = ctx.init_leg(-1, leg.rounds);
                } else {
                    int src = spin_of(leg.source);
                    f[o][0] = ctx.leg(+1, src, leg.rounds);
                    f[o][1] = ctx.leg(-1, src, leg.rounds);
                }
            }
            w *= ctx.gate_weight(spin_of(int(gi)), f[0][0], f[0][1], f[1][0], f[1][1]);
        }
        for (int j = 0; j < spec.n_qubits; ++j) {
            if (owner[size_t(j)] < 0) {
                w *= ctx.init_leg(-1, spec.depth);
            } else {
                int k = spec.depth - owner_layer[size_t(j)] + 1;
                w *= ctx.leg(-1, spin_of(owner[size_t(j)]), k);
            }
        }
        total += w;
    }
    return total;
}

PurityFidelityRatio purity_fidelity_ratio(const StatMechSpec& geometry,
                                          const std::vector<double>& p_values) {
    if (p_values.size() < 4)
        throw std::invalid_argument("statmech: need at least 4 error rates to fit the ratio");

    PurityFidelityRatio out;
    out.volume = geometry.volume();
    for (double p : p_values) {
        StatMechSpec s = geometry;
        s.p = p;
        double pur = statmech_partition(s, StatMechQuantity::purity);
        double fid = statmech_partition(s, StatMechQuantity::fidelity);
        if (fid <= 0.0) throw std::runtime_error("statmech: fidelity partition not positive");
        out.p.push_back(p);
        out.ratio.push_back(pur / (fid * fid));
    }

    Eigen::Index m = Eigen::Index(out.p.size());
    Eigen::MatrixXd x(m, 3);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        double pi = out.p[size_t(i)];
        double pv = pi * out.volume;
        x(i, 0) = pv;
        x(i, 1) = pi * pv;
        x(i, 2) = pi * pi * pv;
        y(i) = std::log(out.ratio[size_t(i)]);
    }
    LinearFit fit = linear_fit(x, y);
    out.linear = fit.beta(0);
    out.linear_err = fit.stderr_beta(0);
    out.c = fit.beta(1);
    out.c_err = fit.stderr_beta(1);
    out.cubic = fit.beta(2);
    return out;
}

}  // namespace rydbench
