#include "rydbench/rydberg.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace rydbench {

double RydbergParams::pair_coupling(int distance) const {
    if (distance < 1) throw std::invalid_argument("pair distance must be >= 1");
    if (distance > interaction_cutoff) return 0.0;
    double d6 = std::pow(double(distance), 6);
    return blockade / d6;
}

double RydbergParams::rabi(int site) const {
    return omega * (1.0 + omega_slope * site);
}

double RydbergParams::detuning(int site) const {
    return delta + delta_slope * site;
}

std::string RydbergParams::to_json() const {
    nlohmann::json j;
    j["n_sites"] = n_sites;
    j["rabi"] = omega;
    j["detuning"] = delta;
    j["vnn_over_rabi"] = blockade;
    j["cutoff"] = interaction_cutoff;
    j["gradients"] = {{"rabi", omega_slope}, {"detuning", delta_slope}};
    return j.dump(2);
}

RydbergParams RydbergParams::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    RydbergParams p;
    p.n_sites = j.at("n_sites").get<int>();
    p.omega = j.value("rabi", 1.0);
    p.delta = j.value("detuning", 0.0);
    p.blockade = j.value("vnn_over_rabi", 13.0);
    p.interaction_cutoff = j.value("cutoff", 5);
    if (j.contains("gradients")) {
        p.omega_slope = j["gradients"].value("rabi", 0.0);
        p.delta_slope = j["gradients"].value("detuning", 0.0);
    }
    if (p.n_sites < 1) throw std::invalid_argument("n_sites must be positive");
    if (p.omega <= 0.0) throw std::invalid_argument("omega must be positive");
    if (p.interaction_cutoff < 1)
        throw std::invalid_argument("interaction_cutoff must be >= 1");
    return p;
}

Matrix block_hamiltonian(const RydbergParams& p, int first, int width) {
    if (width < 1 || first < 0 || first + width > p.n_sites)
        throw std::invalid_argument("block_hamiltonian: block out of range");
    const Eigen::Index dim = Eigen::Index(1) << width;
    Matrix h = Matrix::Zero(dim, dim);

    auto bit = [&](Eigen::Index z, int k) { return int((z >> (width - 1 - k)) & 1); };

    for (Eigen::Index z = 0; z < dim; ++z) {
        double diag = 0.0;
        for (int k = 0; k < width; ++k) {
            if (!bit(z, k)) continue;
            diag -= p.detuning(first + k);
            for (int m = k + 1; m < width; ++m)
                if (bit(z, m)) diag += p.pair_coupling(m - k);
        }
        h(z, z) = diag;
        // Sx flips one site at a time with amplitude omega_i / 2.
        for (int k = 0; k < width; ++k) {
            Eigen::Index z2 = z ^ (Eigen::Index(1) << (width - 1 - k));
            h(z2, z) += 0.5 * p.rabi(first + k);
        }
    }
    return h;
}

bool is_blockaded(const std::vector<int>& bits) {
    for (size_t i = 0; i + 1 < bits.size(); ++i)
        if (bits[i] == 1 && bits[i + 1] == 1) return false;
    return true;
}

int blockade_violations(const std::vector<int>& bits) {
    int v = 0;
    for (size_t i = 0; i + 1 < bits.size(); ++i)
        if (bits[i] == 1 && bits[i + 1] == 1) ++v;
    return v;
}

uint64_t blockade_dimension(int n_sites) {
    if (n_sites < 0) throw std::invalid_argument("negative site count");
    // F(n+2) with F(1)=F(2)=1; 0 sites -> 1 (empty string).
    uint64_t a = 1, b = 2;  // dimensions for 0 and 1 sites
    if (n_sites == 0) return a;
    for (int i = 1; i < n_sites; ++i) {
        uint64_t c = a + b;
        a = b;
        b = c;
    }
    return b;
}

std::vector<size_t> blockaded_indices(int n_sites) {
    if (n_sites < 1 || n_sites > 30)
        throw std::invalid_argument("blockaded_indices: unsupported size");
    std::vector<size_t> out;
    out.reserve(blockade_dimension(n_sites));
    const size_t dim = size_t(1) << n_sites;
    for (size_t z = 0; z < dim; ++z)
        if ((z & (z >> 1)) == 0) out.push_back(z);
    return out;
}

}  // namespace rydbench
