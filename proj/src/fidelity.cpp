#include "rydbench/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include "rydbench/dense.hpp"
#include "rydbench/rng.hpp"
#include "rydbench/rydberg.hpp"

namespace rydbench {

namespace {

std::string bits_to_string(const std::vector<int>& bits) {
    std::string s(bits.size(), '0');
    for (size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) s[i] = '1';
    }
    return s;
}

}  // namespace

// ============================================================================
// Measured data
// ============================================================================

int BitstringDataset::n_sites() const {
    return bitstrings.empty() ? 0 : static_cast<int>(bitstrings.front().size());
}

std::vector<BitstringDataset> load_bitstrings(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open bitstring file: " + path);
    }

    std::vector<BitstringDataset> out;
    BitstringDataset cur;
    bool group_open = false;
    size_t lineno = 0;

    auto fail = [&](const std::string& what) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + what);
    };
    auto flush = [&] {
        if (!group_open && cur.bitstrings.empty()) return;
        if (cur.bitstrings.empty()) fail("bitstring group has no shots");
        out.push_back(std::move(cur));
        cur = BitstringDataset{};
        group_open = false;
    };

    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
            line.pop_back();
        }
        size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        line.erase(0, first);

        if (line[0] == '#') {
            flush();
            group_open = true;
            std::string rest = line.substr(1);
            size_t pos = 0;
            while (pos < rest.size()) {
                size_t start = rest.find_first_not_of(" \t", pos);
                if (start == std::string::npos) break;
                size_t end = rest.find_first_of(" \t", start);
                if (end == std::string::npos) end = rest.size();
                std::string tok = rest.substr(start, end - start);
                pos = end;
                if (tok.rfind("island=", 0) == 0) {
                    cur.island = tok.substr(7);
                } else if (tok.rfind("t=", 0) == 0) {
                    try {
                        cur.time = std::stod(tok.substr(2));
                    } catch (const std::exception&) {
                        fail("bad time value in header: " + tok);
                    }
                }
            }
            continue;
        }

        std::vector<int> bits(line.size());
        for (size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '0') {
                bits[i] = 0;
            } else if (line[i] == '1') {
                bits[i] = 1;
            } else {
                fail(std::string("invalid character '") + line[i] + "' in bitstring");
            }
        }
        if (!cur.bitstrings.empty() && bits.size() != cur.bitstrings.front().size()) {
            fail("inconsistent bitstring length");
        }
        cur.bitstrings.push_back(std::move(bits));
    }
    ++lineno;
    flush();
    return out;
}

void save_bitstrings(const std::string& path, const std::vector<BitstringDataset>& sets) {
    std::ofstream outf(path);
    if (!outf) {
        throw std::runtime_error("cannot write bitstring file: " + path);
    }
    char header[128];
    for (const auto& set : sets) {
        if (set.island.empty()) {
            std::snprintf(header, sizeof(header), "# t=%.17g\n", set.time);
        } else {
            std::snprintf(header, sizeof(header), "# island=%s t=%.17g\n", set.island.c_str(),
                          set.time);
        }
        outf << header;
        for (const auto& bits : set.bitstrings) {
            outf << bits_to_string(bits) << '\n';
        }
    }
    if (!outf) {
        throw std::runtime_error("write failed: " + path);
    }
}

// ============================================================================
// Probability providers
// ============================================================================

ProbabilityModel ProbabilityModel::from_mps(Mps psi, double time, double f_svd) {
    if (f_svd <= 0.0 || f_svd > 1.0 + 1e-12) {
        throw std::invalid_argument("truncation fidelity must lie in (0, 1]");
    }
    ProbabilityModel m;
    m.n_sites_ = psi.n_sites();
    m.mps_ = std::make_shared<const Mps>(std::move(psi));
    m.time_ = time;
    m.f_svd_ = f_svd;
    return m;
}

ProbabilityModel ProbabilityModel::from_dense(Vector amp, int n_sites, double time, double f_svd) {
    if (n_sites < 1 || n_sites > 30) {
        throw std::invalid_argument("dense probability model limited to 1..30 sites");
    }
    if (amp.size() != (Eigen::Index(1) << n_sites)) {
        throw std::invalid_argument("dense amplitude size does not match site count");
    }
    if (f_svd <= 0.0 || f_svd > 1.0 + 1e-12) {
        throw std::invalid_argument("truncation fidelity must lie in (0, 1]");
    }
    ProbabilityModel m;
    m.n_sites_ = n_sites;
    m.dense_ = std::make_shared<const Vector>(std::move(amp));
    m.time_ = time;
    m.f_svd_ = f_svd;
    return m;
}

int ProbabilityModel::max_bond_dim() const {
    return mps_ ? mps_->max_bond_dim() : 0;
}

double ProbabilityModel::probability(const std::vector<int>& bits) const {
    if (static_cast<int>(bits.size()) != n_sites_) {
        throw std::invalid_argument("bitstring length does not match the model");
    }
    if (mps_) {
        return std::norm(mps_->amplitude(bits));
    }
    return std::norm((*dense_)(bits_to_index(bits)));
}

std::vector<std::vector<int>> ProbabilityModel::sample(int shots, uint64_t seed) const {
    if (shots < 1) {
        throw std::invalid_argument("shot count must be positive");
    }
    if (mps_) {
        return mps_->sample(shots, seed);
    }

    const Vector& amp = *dense_;
    std::vector<double> cdf(amp.size());
    double acc = 0.0;
    for (Eigen::Index z = 0; z < amp.size(); ++z) {
        acc += std::norm(amp(z));
        cdf[z] = acc;
    }
    if (acc <= 0.0) {
        throw std::runtime_error("cannot sample from a zero state");
    }

    std::vector<std::vector<int>> out;
    out.reserve(shots);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int m = 0; m < shots; ++m) {
        auto rng = make_rng(seed, static_cast<uint64_t>(m));
        double u = unit(rng) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        size_t z = std::min<size_t>(it - cdf.begin(), cdf.size() - 1);
        out.push_back(index_to_bits(z, n_sites_));
    }
    return out;
}

double ProbabilityModel::blockade_weight() const {
    if (dense_) {
        const Vector& amp = *dense_;
        double w = 0.0;
        for (size_t z = 0; z < static_cast<size_t>(amp.size()); ++z) {
            if ((z & (z >> 1)) == 0) w += std::norm(amp(z));
        }
        return w;
    }

    // Sweep a two-state automaton (state = previous bit) through the chain;
    // l0/l1 hold the partial contraction of |psi|^2 restricted to prefixes
    // that are still blockade-legal and end in 0/1.
    Matrix l0 = Matrix::Identity(1, 1);
    Matrix l1 = Matrix::Zero(1, 1);
    for (int site = 0; site < n_sites_; ++site) {
        const Tensor3& t = mps_->tensor(site);
        Matrix a0 = t.slice(0);
        Matrix a1 = t.slice(1);
        Matrix any = l0 + l1;
        Matrix n0 = a0.adjoint() * any * a0;
        Matrix n1 = a1.adjoint() * l0 * a1;
        l0 = std::move(n0);
        l1 = std::move(n1);
    }
    return ((l0 + l1).trace()).real();
}

AveragedModel::AveragedModel(std::vector<ProbabilityModel> models, std::vector<double> weights)
    : models_(std::move(models)), weights_(std::move(weights)) {
    if (models_.empty()) {
        throw std::invalid_argument("averaged model needs at least one distribution");
    }
    if (models_.size() != weights_.size()) {
        throw std::invalid_argument("model and weight counts differ");
    }
    double total = 0.0;
    for (double w : weights_) {
        if (w < 0.0 || !std::isfinite(w)) {
            throw std::invalid_argument("averaging weights must be finite and nonnegative");
        }
        total += w;
    }
    if (total <= 0.0) {
        throw std::invalid_argument("averaging weights sum to zero");
    }
    for (double& w : weights_) w /= total;
    for (const auto& m : models_) {
        if (m.n_sites() != models_.front().n_sites()) {
            throw std::invalid_argument("averaged models must share the site count");
        }
    }
}

double AveragedModel::p_avg(const std::vector<int>& bits) const {
    double p = 0.0;
    for (size_t j = 0; j < models_.size(); ++j) {
        if (weights_[j] > 0.0) p += weights_[j] * models_[j].probability(bits);
    }
    return p;
}

double AveragedModel::blockade_weight() const {
    double b = 0.0;
    for (size_t j = 0; j < models_.size(); ++j) {
        if (weights_[j] > 0.0) b += weights_[j] * models_[j].blockade_weight();
    }
    return b;
}

int AveragedModel::n_sites() const {
    return models_.front().n_sites();
}

std::vector<double> averaging_grid(double t_center, double t_min, double t_max,
                                   double half_width, double step) {
    if (step <= 0.0 || half_width < 0.0) {
        throw std::invalid_argument("window step must be positive and half width nonnegative");
    }
    if (t_min > t_max) {
        throw std::invalid_argument("empty time range");
    }
    std::vector<double> grid;
    long k_max = static_cast<long>(std::floor(half_width / step + 1e-9));
    for (long k = -k_max; k <= k_max; ++k) {
        double t = t_center + static_cast<double>(k) * step;
        if (t < t_min - 1e-12 || t > t_max + 1e-12) continue;
        grid.push_back(std::min(std::max(t, t_min), t_max));
    }
    return grid;
}

AveragedModel build_p_avg(const std::vector<ProbabilityModel>& models, double t_center,
                          double half_width) {
    std::vector<ProbabilityModel> inside;
    for (const auto& m : models) {
        if (std::abs(m.time() - t_center) <= half_width + 1e-9) inside.push_back(m);
    }
    if (inside.empty()) {
        throw std::invalid_argument("averaging window contains no snapshots");
    }

    size_t ref = 0;
    for (size_t j = 1; j < inside.size(); ++j) {
        if (std::abs(inside[j].time() - t_center) < std::abs(inside[ref].time() - t_center)) {
            ref = j;
        }
    }
    double f_ref = inside[ref].f_svd();
    std::vector<double> weights(inside.size());
    for (size_t j = 0; j < inside.size(); ++j) {
        double f = inside[j].f_svd();
        weights[j] = std::min(f_ref / f, f / f_ref);
    }
    return AveragedModel(std::move(inside), std::move(weights));
}

// ============================================================================
// Estimates
// ============================================================================

std::string FidelityEstimate::text_record() const {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "island=%s t=%.6g F_d=%.8g sigma=%.4g M=%zu num=%.8g num_sigma=%.4g "
                  "den=%.8g den_sigma=%.4g den_shots=%zu blockaded=%d B_exp=%.6g B_thy=%.6g",
                  island.empty() ? "-" : island.c_str(), time, value, sigma, shots, numerator,
                  numerator_sigma, denominator, denominator_sigma, denominator_shots,
                  blockaded ? 1 : 0, b_exp, b_thy);
    return buf;
}

namespace {

double ratio_at(const std::vector<int>& bits, const ProbabilityModel& p,
                const AveragedModel& pavg, const char* side) {
    double pa = pavg.p_avg(bits);
    if (pa <= 0.0) {
        throw std::runtime_error(std::string("p_avg vanishes at ") + side + " bitstring " +
                                 bits_to_string(bits));
    }
    return p.probability(bits) / pa;
}

void check_shapes(const BitstringDataset& data, const ProbabilityModel& p,
                  const AveragedModel& pavg) {
    if (data.shots() < 2) {
        throw std::invalid_argument("need at least two measured bitstrings");
    }
    if (data.n_sites() != p.n_sites() || p.n_sites() != pavg.n_sites()) {
        throw std::invalid_argument("dataset, model and average disagree on the site count");
    }
}

size_t pick_denominator_shots(size_t denom_shots, size_t m) {
    if (denom_shots == 0) {
        return std::max<size_t>(10 * m, 1000);
    }
    if (denom_shots < 1000) {
        throw std::invalid_argument("denominator shot count below 1000");
    }
    return denom_shots;
}

struct SideStats {
    double mean = 0.0;
    double sigma = 0.0;
};

SideStats side_stats(const std::vector<double>& x) {
    SideStats s;
    for (double v : x) s.mean += v;
    s.mean /= static_cast<double>(x.size());
    s.sigma = fd_error(x);
    return s;
}

}  // namespace

std::vector<double> rescaled_probabilities(const BitstringDataset& data,
                                           const ProbabilityModel& p,
                                           const AveragedModel& pavg) {
    std::vector<double> x;
    x.reserve(data.shots());
    for (const auto& bits : data.bitstrings) {
        x.push_back(ratio_at(bits, p, pavg, "measured"));
    }
    return x;
}

double fd_error(const std::vector<double>& rescaled, size_t m) {
    if (m == 0) m = rescaled.size();
    if (m < 2 || rescaled.size() < 2) {
        throw std::invalid_argument("sampling error needs at least two samples");
    }
    double e1 = 0.0, e2 = 0.0;
    for (double v : rescaled) {
        e1 += v;
        e2 += v * v;
    }
    e1 /= static_cast<double>(rescaled.size());
    e2 /= static_cast<double>(rescaled.size());
    double var = std::max(0.0, e2 - e1 * e1);
    return std::sqrt(var / static_cast<double>(m));
}

FidelityEstimate estimate_fd(const BitstringDataset& data, const ProbabilityModel& p,
                             const AveragedModel& pavg, size_t denom_shots, uint64_t seed) {
    check_shapes(data, p, pavg);
    const size_t m = data.shots();
    const size_t k = pick_denominator_shots(denom_shots, m);

    SideStats num = side_stats(rescaled_probabilities(data, p, pavg));

    std::vector<double> y;
    y.reserve(k);
    for (const auto& bits : p.sample(static_cast<int>(k), seed)) {
        y.push_back(ratio_at(bits, p, pavg, "importance-sampled"));
    }
    SideStats den = side_stats(y);
    if (den.mean <= 0.0) {
        throw std::runtime_error("denominator estimate vanished");
    }

    double r = num.mean / den.mean;
    double var_r = (num.sigma / den.mean) * (num.sigma / den.mean) +
                   (num.mean * den.sigma / (den.mean * den.mean)) *
                       (num.mean * den.sigma / (den.mean * den.mean));

    FidelityEstimate est;
    est.value = 2.0 * r - 1.0;
    est.sigma = 2.0 * std::sqrt(var_r);
    est.numerator = num.mean;
    est.numerator_sigma = num.sigma;
    est.denominator = den.mean;
    est.denominator_sigma = den.sigma;
    est.shots = m;
    est.denominator_shots = k;
    est.island = data.island;
    est.time = data.time;
    return est;
}

FidelityEstimate estimate_fd_blockaded(const BitstringDataset& data, const ProbabilityModel& p,
                                       const AveragedModel& pavg, size_t denom_shots,
                                       uint64_t seed) {
    check_shapes(data, p, pavg);
    const size_t m_total = data.shots();

    std::vector<const std::vector<int>*> kept;
    for (const auto& bits : data.bitstrings) {
        if (is_blockaded(bits)) kept.push_back(&bits);
    }
    if (kept.empty()) {
        throw std::runtime_error("no blockaded samples in dataset");
    }
    if (kept.size() < 2) {
        throw std::invalid_argument("need at least two blockaded samples");
    }

    double b_exp = static_cast<double>(kept.size()) / static_cast<double>(m_total);
    double b_exp_sigma = std::sqrt(b_exp * (1.0 - b_exp) / static_cast<double>(m_total));
    double b_thy = p.blockade_weight();
    if (b_thy <= 0.0) {
        throw std::runtime_error("model carries no blockaded weight");
    }
    double b_avg = pavg.blockade_weight();
    // p'(z)/p'_avg(z) = (p/p_avg) * (B_avg / B_thy) on the blockaded sector.
    double scale = b_avg / b_thy;

    std::vector<double> x;
    x.reserve(kept.size());
    for (const auto* bits : kept) {
        x.push_back(ratio_at(*bits, p, pavg, "measured") * scale);
    }
    SideStats num = side_stats(x);

    // Draws from p, rejected onto the sector, are exactly draws from p', so
    // the mean of p'/p'_avg over them estimates sum_{z in sector} p'^2/p'_avg.
    const size_t k_requested = pick_denominator_shots(denom_shots, kept.size());
    std::vector<double> y;
    y.reserve(k_requested);
    for (const auto& bits : p.sample(static_cast<int>(k_requested), seed)) {
        if (is_blockaded(bits)) {
            y.push_back(ratio_at(bits, p, pavg, "importance-sampled") * scale);
        }
    }
    if (y.size() < 2) {
        throw std::runtime_error("importance sampling yielded fewer than two blockaded draws");
    }
    SideStats den = side_stats(y);
    if (den.mean <= 0.0) {
        throw std::runtime_error("denominator estimate vanished");
    }

    double g = 2.0 * num.mean / den.mean - 1.0;
    double var_g = 4.0 * ((num.sigma / den.mean) * (num.sigma / den.mean) +
                          (num.mean * den.sigma / (den.mean * den.mean)) *
                              (num.mean * den.sigma / (den.mean * den.mean)));

    FidelityEstimate est;
    est.value = b_thy * b_exp * g;
    est.sigma = std::sqrt(b_thy * b_exp * b_thy * b_exp * var_g +
                          (b_thy * g * b_exp_sigma) * (b_thy * g * b_exp_sigma));
    est.numerator = num.mean;
    est.numerator_sigma = num.sigma;
    est.denominator = den.mean;
    est.denominator_sigma = den.sigma;
    est.shots = kept.size();
    est.denominator_shots = y.size();
    est.blockaded = true;
    est.b_exp = b_exp;
    est.b_thy = b_thy;
    est.island = data.island;
    est.time = data.time;
    return est;
}

FidelityEstimate island_average(const std::vector<FidelityEstimate>& per_island) {
    if (per_island.empty()) {
        throw std::invalid_argument("island average needs at least one estimate");
    }
    double total = 0.0;
    for (const auto& e : per_island) total += static_cast<double>(e.shots);
    if (total <= 0.0) {
        throw std::invalid_argument("island average needs positive shot counts");
    }

    FidelityEstimate out;
    double var = 0.0;
    for (const auto& e : per_island) {
        double w = static_cast<double>(e.shots) / total;
        out.value += w * e.value;
        var += w * w * e.sigma * e.sigma;
        out.time += w * e.time;
        out.b_exp += w * e.b_exp;
        out.b_thy += w * e.b_thy;
        out.shots += e.shots;
    }
    out.sigma = std::sqrt(var);
    out.blockaded = per_island.front().blockaded;
    out.island = per_island.size() == 1 ? per_island.front().island : "all";
    return out;
}

double sample_complexity(const std::vector<FidelityEstimate>& per_time) {
    if (per_time.empty()) {
        throw std::invalid_argument("sample complexity needs at least one estimate");
    }
    double acc = 0.0, wsum = 0.0;
    for (const auto& e : per_time) {
        double dist = std::abs(e.value - 0.5);
        double w = dist > 0.0 ? std::min(1.0 / dist, complexity_weight_cap)
                              : complexity_weight_cap;
        acc += e.sigma * std::sqrt(static_cast<double>(e.shots)) * w;
        wsum += w;
    }
    return acc / wsum;
}

// ============================================================================
// Diagnostics
// ============================================================================

PorterThomasReport porter_thomas_report(std::vector<double> ratios) {
    if (ratios.empty()) {
        throw std::invalid_argument("diagnostic needs at least one ratio");
    }
    std::sort(ratios.begin(), ratios.end());

    PorterThomasReport rep;
    rep.n = ratios.size();
    for (double v : ratios) rep.mean += v;
    rep.mean /= static_cast<double>(rep.n);

    double n = static_cast<double>(rep.n);
    for (size_t i = 0; i < ratios.size(); ++i) {
        double x = std::max(0.0, ratios[i]);
        double cdf_exp = 1.0 - std::exp(-x);
        double cdf_sb = 1.0 - (1.0 + x) * std::exp(-x);
        double lo = static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n;
        rep.ks_exponential =
            std::max(rep.ks_exponential, std::max(cdf_exp - lo, hi - cdf_exp));
        rep.ks_size_biased =
            std::max(rep.ks_size_biased, std::max(cdf_sb - lo, hi - cdf_sb));
    }
    return rep;
}

double linear_xeb(const BitstringDataset& data, const ProbabilityModel& p) {
    if (data.shots() == 0) {
        throw std::invalid_argument("need at least one measured bitstring");
    }
    if (data.n_sites() != p.n_sites()) {
        throw std::invalid_argument("dataset and model disagree on the site count");
    }
    double mean = 0.0;
    for (const auto& bits : data.bitstrings) {
        mean += p.probability(bits);
    }
    mean /= static_cast<double>(data.shots());
    return std::ldexp(1.0, p.n_sites()) * mean - 1.0;
}

}  // namespace rydbench
