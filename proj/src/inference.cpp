#include "rydbench/inference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "rydbench/evolve.hpp"
#include "rydbench/fit.hpp"
#include "rydbench/noise_theory.hpp"
#include "rydbench/rng.hpp"
#include "rydbench/rydberg.hpp"

namespace rydbench {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---- training table ---------------------------------------------------------

std::vector<TrainingPoint> load_training_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<TrainingPoint> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("N,", 0) == 0) continue;  // header
        }
        TrainingPoint p;
        if (std::sscanf(line.c_str(), "%d,%lf,%d,%lf,%lf,%lf", &p.n_sites,
                        &p.time, &p.chi, &p.chi_tilde, &p.fd, &p.sigma) != 6)
            throw std::runtime_error(path + ": malformed row: " + line);
        rows.push_back(p);
    }
    if (rows.empty()) throw std::runtime_error(path + ": no data rows");
    return rows;
}

void save_training_table(const std::string& path,
                         const std::vector<TrainingPoint>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "N,t,chi,chi_tilde,fd,sigma\n";
    char buf[160];
    for (const auto& p : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.6f,%d,%.8f,%.8f,%.8f\n", p.n_sites,
                      p.time, p.chi, p.chi_tilde, p.fd, p.sigma);
        out << buf;
    }
}

// ---- chi0 -------------------------------------------------------------------

ChiZeroResult chi_zero(const FidelityCurve& curve, double threshold) {
    if (curve.chis.empty() || curve.chis.size() != curve.fidelities.size())
        throw std::invalid_argument("chi_zero: malformed curve");
    for (size_t i = 1; i < curve.chis.size(); ++i)
        if (curve.chis[i] <= curve.chis[i - 1])
            throw std::invalid_argument("chi_zero: chis must ascend");
    for (size_t i = 0; i < curve.chis.size(); ++i)
        if (curve.fidelities[i] > threshold) return {curve.chis[i], false};
    return {curve.chis.back(), true};
}

int blockade_rank_cap(int n_sites) {
    if (n_sites < 2) throw std::invalid_argument("blockade_rank_cap: need >= 2 sites");
    return int(blockade_dimension(n_sites / 2));
}

double ChiZeroExtrapolator::log_chi0(int n_sites, double t) const {
    const double raw = a * std::min(t, c * n_sites) + b;
    return std::min(raw, std::log(double(blockade_rank_cap(n_sites))));
}

double ChiZeroExtrapolator::operator()(int n_sites, double t) const {
    return std::exp(log_chi0(n_sites, t));
}

ChiZeroExtrapolator fit_chi_zero(const std::vector<ChiZeroPoint>& grid) {
    if (grid.size() < 4)
        throw std::invalid_argument("fit_chi_zero: need at least 4 grid points");
    std::vector<double> logs(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        if (grid[i].chi0 < 1 || grid[i].time < 0)
            throw std::invalid_argument("fit_chi_zero: bad grid point");
        logs[i] = std::log(double(grid[i].chi0));
    }

    auto loss = [&](const std::vector<double>& p) {
        ChiZeroExtrapolator e{p[0], p[1], p[2], 0.0};
        if (e.c <= 0) return 1e12 * (1.0 - e.c);
        double s = 0;
        for (size_t i = 0; i < grid.size(); ++i) {
            const double r = e.log_chi0(grid[i].n_sites, grid[i].time) - logs[i];
            s += r * r;
        }
        return s;
    };

    // Entanglement grows about one ebit per 0.83 cycles and saturates near
    // t ~ 0.4 N; seed the search there and at a few neighbours.
    double best_loss = 1e300;
    std::vector<double> best(3);
    for (double c0 : {0.25, 0.4, 0.6}) {
        const std::vector<double> start = {std::log(2.0) / cycles_per_ebit, 0.0, c0};
        const SimplexResult res = minimize_simplex(loss, start, {0.2, 0.5, 0.1});
        if (res.value < best_loss) {
            best_loss = res.value;
            best = res.x;
        }
    }
    ChiZeroExtrapolator e{best[0], best[1], best[2], 0.0};
    e.residual_rms = std::sqrt(best_loss / double(grid.size()));
    return e;
}

// ---- ensemble ---------------------------------------------------------------

void EnsembleConfig::validate() const {
    if (n_models < 1) throw std::invalid_argument("ensemble: n_models >= 1");
    if (redraw_every < 1) throw std::invalid_argument("ensemble: redraw_every >= 1");
    if (min_hidden_layers < 1 || max_hidden_layers < min_hidden_layers)
        throw std::invalid_argument("ensemble: bad hidden layer range");
    if (min_width < 1 || max_width < min_width)
        throw std::invalid_argument("ensemble: bad width range");
    if (lr_min <= 0 || lr_max < lr_min)
        throw std::invalid_argument("ensemble: bad learning rate range");
    if (batch_sizes.empty()) throw std::invalid_argument("ensemble: no batch sizes");
    if (patience < 1) throw std::invalid_argument("ensemble: patience >= 1");
    if (max_epochs < 1) throw std::invalid_argument("ensemble: max_epochs >= 1");
    if (n_threads < 1) throw std::invalid_argument("ensemble: n_threads >= 1");
}

namespace {

MlpSpec draw_hyperparameters(const EnsembleConfig& cfg, int group) {
    auto rng = make_rng(cfg.seed, 1000 + uint64_t(group));
    MlpSpec spec;
    std::uniform_int_distribution<int> layers(cfg.min_hidden_layers,
                                              cfg.max_hidden_layers);
    std::uniform_real_distribution<double> logw(std::log(double(cfg.min_width)),
                                                std::log(double(cfg.max_width)));
    const int n_layers = layers(rng);
    for (int l = 0; l < n_layers; ++l)
        spec.hidden_widths.push_back(int(std::lround(std::exp(logw(rng)))));
    std::uniform_int_distribution<int> act(0, 2);
    spec.activation = Activation(act(rng));
    std::uniform_real_distribution<double> loglr(std::log(cfg.lr_min),
                                                 std::log(cfg.lr_max));
    spec.learning_rate = std::exp(loglr(rng));
    std::uniform_int_distribution<size_t> bi(0, cfg.batch_sizes.size() - 1);
    spec.batch_size = cfg.batch_sizes[bi(rng)];
    return spec;
}

MatrixXd features(const std::vector<TrainingPoint>& rows) {
    MatrixXd x(rows.size(), 3);
    for (size_t i = 0; i < rows.size(); ++i) {
        x(i, 0) = rows[i].n_sites;
        x(i, 1) = rows[i].time;
        x(i, 2) = rows[i].chi_tilde;
    }
    return x;
}

VectorXd targets(const std::vector<TrainingPoint>& rows) {
    VectorXd y(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) y(i) = rows[i].fd;
    return y;
}

}  // namespace

Ensemble train_ensemble(const std::vector<TrainingPoint>& data,
                        const EnsembleConfig& config) {
    config.validate();
    if (data.size() < 100)
        throw std::invalid_argument("train_ensemble: need at least 100 points");

    // Validation split: two mid-range sizes, high chi_tilde. Falls back to a
    // random 15% holdout when the table lacks that structure.
    std::set<int> sizes;
    for (const auto& p : data) sizes.insert(p.n_sites);
    std::vector<int> sorted_sizes(sizes.begin(), sizes.end());

    auto rng = make_rng(config.seed, 500);
    std::vector<int> held;
    if (sorted_sizes.size() >= 4) {
        std::vector<int> mid(sorted_sizes.begin() + 1, sorted_sizes.end() - 1);
        std::shuffle(mid.begin(), mid.end(), rng);
        held = {mid[0], mid[1]};
    }
    std::vector<TrainingPoint> train_rows, val_rows;
    for (const auto& p : data) {
        const bool is_val = std::count(held.begin(), held.end(), p.n_sites) &&
                            p.chi_tilde >= config.validation_chi_tilde;
        (is_val ? val_rows : train_rows).push_back(p);
    }
    if (val_rows.size() < 10 || train_rows.size() < 50) {
        train_rows.clear();
        val_rows.clear();
        std::uniform_real_distribution<double> u(0, 1);
        for (const auto& p : data)
            (u(rng) < 0.15 ? val_rows : train_rows).push_back(p);
        held.clear();
    }

    MatrixXd x_train = features(train_rows);
    MatrixXd x_val = features(val_rows);
    const VectorXd y_train = targets(train_rows);
    const VectorXd y_val = targets(val_rows);

    Ensemble ens;
    ens.config = config;
    ens.validation_sizes = held;
    for (int k = 0; k < 3; ++k) {
        ens.input_mean(k) = x_train.col(k).mean();
        const double var =
            (x_train.col(k).array() - ens.input_mean(k)).square().mean();
        ens.input_std(k) = std::sqrt(var);
        if (ens.input_std(k) < 1e-12)
            throw std::invalid_argument(
                "train_ensemble: input column " + std::to_string(k) +
                " has zero variance");
    }
    for (int k = 0; k < 3; ++k) {
        x_train.col(k) = (x_train.col(k).array() - ens.input_mean(k)) /
                         ens.input_std(k);
        x_val.col(k) = (x_val.col(k).array() - ens.input_mean(k)) /
                       ens.input_std(k);
    }

    std::vector<std::optional<Mlp>> trained(config.n_models);
    std::vector<double> rmse(config.n_models);
    auto train_one = [&](int m) {
        MlpSpec spec = draw_hyperparameters(config, m / config.redraw_every);
        Mlp model(spec, 3, stream_seed(config.seed, 2000 + uint64_t(m)));
        rmse[m] = model.fit(x_train, y_train, x_val, y_val, config.patience,
                            config.max_epochs);
        trained[m] = std::move(model);
    };
    if (config.n_threads == 1) {
        for (int m = 0; m < config.n_models; ++m) train_one(m);
    } else {
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int m = next++; m < config.n_models; m = next++) train_one(m);
        };
        std::vector<std::thread> pool;
        const int n = std::min(config.n_threads, config.n_models);
        for (int i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (int m = 0; m < config.n_models; ++m) {
        ens.validation_rmse.push_back(rmse[m]);
        ens.models.push_back(std::move(*trained[m]));
    }
    return ens;
}

Prediction predict(const Ensemble& ensemble, int n_sites, double t,
                   double chi_tilde, double sampling_sigma) {
    if (ensemble.models.empty())
        throw std::invalid_argument("predict: empty ensemble");
    VectorXd x(3);
    x << n_sites, t, chi_tilde;
    for (int k = 0; k < 3; ++k)
        x(k) = (x(k) - ensemble.input_mean(k)) / ensemble.input_std(k);

    std::vector<double> outs;
    outs.reserve(ensemble.models.size());
    for (const auto& m : ensemble.models) outs.push_back(m.predict_one(x));
    const MeanSem ms = mean_sem(outs);
    Prediction p;
    p.mean = ms.mean;
    p.sem = ms.sem;
    p.total_sigma = std::hypot(ms.sem, sampling_sigma);
    return p;
}

// ---- ensemble persistence -----------------------------------------------------

namespace {

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::logistic: return "logistic";
        case Activation::tanh_sig: return "tanh";
        case Activation::softsign: return "softsign";
    }
    throw std::logic_error("unreachable");
}

Activation activation_from_name(const std::string& s) {
    if (s == "logistic") return Activation::logistic;
    if (s == "tanh") return Activation::tanh_sig;
    if (s == "softsign") return Activation::softsign;
    throw std::runtime_error("unknown activation: " + s);
}

void write_weights(const std::string& path, const VectorXd& v) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write("MPW1", 4);
    const uint32_t n = uint32_t(v.size());
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(v.data()),
              std::streamsize(sizeof(double)) * v.size());
    if (!out) throw std::runtime_error("write failed: " + path);
}

VectorXd read_weights(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "MPW1")
        throw std::runtime_error(path + ": not a weight file");
    uint32_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    VectorXd v(n);
    in.read(reinterpret_cast<char*>(v.data()),
            std::streamsize(sizeof(double)) * n);
    if (!in) throw std::runtime_error(path + ": truncated weight file");
    return v;
}

}  // namespace

void save_ensemble(const std::string& dir, const Ensemble& ensemble) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    nlohmann::json manifest;
    manifest["input_mean"] = {ensemble.input_mean(0), ensemble.input_mean(1),
                              ensemble.input_mean(2)};
    manifest["input_std"] = {ensemble.input_std(0), ensemble.input_std(1),
                             ensemble.input_std(2)};
    manifest["validation_sizes"] = ensemble.validation_sizes;
    manifest["seed"] = ensemble.config.seed;
    manifest["models"] = nlohmann::json::array();
    char name[64];
    for (size_t m = 0; m < ensemble.models.size(); ++m) {
        const Mlp& model = ensemble.models[m];
        std::snprintf(name, sizeof name, "model_%03zu.bin", m);
        nlohmann::json j;
        j["file"] = name;
        j["hidden_widths"] = model.spec().hidden_widths;
        j["activation"] = activation_name(model.spec().activation);
        j["learning_rate"] = model.spec().learning_rate;
        j["batch_size"] = model.spec().batch_size;
        j["momentum"] = model.spec().momentum;
        j["validation_rmse"] = ensemble.validation_rmse[m];
        manifest["models"].push_back(j);
        write_weights((fs::path(dir) / name).string(), model.parameters());
    }
    std::ofstream out(fs::path(dir) / "manifest.json", std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write manifest in " + dir);
    out << manifest.dump(2) << '\n';
}

Ensemble load_ensemble(const std::string& dir) {
    namespace fs = std::filesystem;
    std::ifstream in(fs::path(dir) / "manifest.json");
    if (!in) throw std::runtime_error("missing manifest.json in " + dir);
    nlohmann::json manifest = nlohmann::json::parse(in);

    Ensemble ens;
    for (int k = 0; k < 3; ++k) {
        ens.input_mean(k) = manifest.at("input_mean")[k].get<double>();
        ens.input_std(k) = manifest.at("input_std")[k].get<double>();
    }
    ens.validation_sizes =
        manifest.at("validation_sizes").get<std::vector<int>>();
    ens.config.seed = manifest.at("seed").get<uint64_t>();
    for (const auto& j : manifest.at("models")) {
        MlpSpec spec;
        spec.hidden_widths = j.at("hidden_widths").get<std::vector<int>>();
        spec.activation = activation_from_name(j.at("activation").get<std::string>());
        spec.learning_rate = j.at("learning_rate").get<double>();
        spec.batch_size = j.at("batch_size").get<int>();
        spec.momentum = j.at("momentum").get<double>();
        Mlp model(spec, 3, 0);
        model.set_parameters(
            read_weights((fs::path(dir) / j.at("file").get<std::string>()).string()));
        ens.models.push_back(std::move(model));
        ens.validation_rmse.push_back(j.at("validation_rmse").get<double>());
    }
    ens.config.n_models = int(ens.models.size());
    if (ens.models.empty()) throw std::runtime_error(dir + ": empty ensemble");
    return ens;
}

// ---- chi* -------------------------------------------------------------------

namespace {

// First chi in the ascending curve with value >= target; linear extrapolation
// from the top pair when the curve never gets there.
std::pair<double, bool> crossing_chi(const std::vector<int>& chis,
                                     const std::vector<double>& values,
                                     double target) {
    for (size_t i = 0; i < chis.size(); ++i)
        if (values[i] >= target) return {double(chis[i]), false};
    const size_t k = chis.size() - 1;
    const double slope = (values[k] - values[k - 1]) /
                         double(chis[k] - chis[k - 1]);
    if (slope <= 0)
        throw std::runtime_error("chi* extrapolation failed: family is not "
                                 "improving with chi");
    return {chis[k] + (target - values[k]) / slope, true};
}

}  // namespace

ChiStarResult chi_star(const std::vector<double>& experiment_f,
                       const std::vector<int>& chis,
                       const std::vector<std::vector<double>>& fsvd_family) {
    if (chis.empty() || fsvd_family.size() != chis.size())
        throw std::invalid_argument("chi_star: empty or mismatched family");
    for (const auto& row : fsvd_family)
        if (row.size() != experiment_f.size())
            throw std::invalid_argument("chi_star: family rows must match the "
                                        "experiment time grid");
    for (size_t i = 1; i < chis.size(); ++i)
        if (chis[i] <= chis[i - 1])
            throw std::invalid_argument("chi_star: chis must ascend");

    const double f_max =
        *std::max_element(experiment_f.begin(), experiment_f.end());
    if (f_max <= 0) return {1, false};

    for (size_t i = 0; i < chis.size(); ++i) {
        bool dominates = true;
        for (size_t t = 0; t < experiment_f.size(); ++t)
            if (fsvd_family[i][t] < experiment_f[t]) {
                dominates = false;
                break;
            }
        if (dominates) return {chis[i], false};
    }

    // Per failing time, extrapolate the chi needed; chi* covers the worst.
    double needed = 0;
    for (size_t t = 0; t < experiment_f.size(); ++t) {
        std::vector<double> column(chis.size());
        for (size_t i = 0; i < chis.size(); ++i) column[i] = fsvd_family[i][t];
        needed = std::max(needed,
                          crossing_chi(chis, column, experiment_f[t]).first);
    }
    return {int(std::ceil(needed)), true};
}

std::vector<ChiStarCurvePoint> chi_star_vs_per_atom_fidelity(
    const std::vector<double>& per_atom_grid, int n_sites, double t,
    const std::vector<int>& chis, const std::vector<double>& fsvd_at_t) {
    if (chis.empty() || chis.size() != fsvd_at_t.size())
        throw std::invalid_argument("chi_star_vs_per_atom_fidelity: bad curve");
    if (n_sites < 1 || t <= 0)
        throw std::invalid_argument("chi_star_vs_per_atom_fidelity: bad (N, t)");
    std::vector<ChiStarCurvePoint> out;
    for (double f_atom : per_atom_grid) {
        if (f_atom <= 0 || f_atom > 1)
            throw std::invalid_argument("per-atom fidelity must be in (0, 1]");
        const double target = std::pow(f_atom, double(n_sites) * t);
        auto [chi, extrap] = crossing_chi(chis, fsvd_at_t, target);
        out.push_back({f_atom, chi, extrap});
    }
    return out;
}

// ---- stretched-exponential decay ----------------------------------------------

StretchedExpFit fit_fsvd_decay(const std::vector<double>& times,
                               const std::vector<double>& fsvd,
                               double chi_tilde, double exact_threshold) {
    if (times.size() != fsvd.size() || times.empty())
        throw std::invalid_argument("fit_fsvd_decay: malformed curve");

    StretchedExpFit fit;
    fit.chi_tilde = chi_tilde;
    for (size_t i = 0; i < times.size(); ++i)
        if (fsvd[i] >= exact_threshold) fit.t_exact = std::max(fit.t_exact, times[i]);

    std::vector<double> ts, fs;
    for (size_t i = 0; i < times.size(); ++i)
        if (times[i] > fit.t_exact && fsvd[i] < exact_threshold &&
            fsvd[i] > 0 && times[i] > 0) {
            ts.push_back(times[i]);
            fs.push_back(fsvd[i]);
        }
    if (ts.size() < 4)
        throw std::invalid_argument(
            "fit_fsvd_decay: need at least 4 points past the exact window");

    // ln(-ln F) = beta ln t - beta ln tau.
    MatrixXd x(ts.size(), 2);
    VectorXd y(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = std::log(ts[i]);
        y(i) = std::log(-std::log(fs[i]));
    }
    const LinearFit lin = linear_fit(x, y);
    fit.beta = lin.beta(1);
    fit.tau = std::exp(-lin.beta(0) / fit.beta);
    fit.converged = std::isfinite(fit.beta) && fit.beta > 0 &&
                    std::isfinite(fit.tau);

    double ss = 0;
    for (size_t i = 0; i < ts.size(); ++i) {
        const double model = std::exp(-std::pow(ts[i] / fit.tau, fit.beta));
        ss += (model - fs[i]) * (model - fs[i]);
    }
    fit.residual_rms = std::sqrt(ss / double(ts.size()));
    return fit;
}

// ---- cost model ----------------------------------------------------------------

CostEstimate cost_model(int chi, int n_sites, const CostReference& ref) {
    if (ref.chi_ref < 1 || ref.n_ref < 1 || ref.seconds_ref <= 0)
        throw std::invalid_argument("cost_model: missing reference point");
    if (chi < 1 || n_sites < 1)
        throw std::invalid_argument("cost_model: bad query");
    const double n_scale = double(n_sites) / ref.n_ref;
    const double chi_scale = double(chi) / ref.chi_ref;
    CostEstimate est;
    est.sim_seconds = ref.seconds_ref * n_scale * chi_scale * chi_scale * chi_scale;
    est.memory_bytes = 16.0 * n_sites * 2.0 * double(chi) * chi;
    // Sampling shares the anchor but drops one power of chi.
    est.per_sample_seconds = ref.seconds_ref * n_scale * chi_scale * chi_scale;
    return est;
}

// ---- emulated experiment ---------------------------------------------------------

double emulated_quantum_fidelity(const EmulationConfig& cfg, int n_sites,
                                 double t) {
    const double markov = std::exp(-cfg.gamma_site * n_sites * t);
    return markov *
           nonexp_decay(cfg.lambda_site * n_sites * t * t, cfg.delta_miscal);
}

EmulatedExperiment emulate_experiment(const EmulationConfig& cfg) {
    if (cfg.sizes.empty()) throw std::invalid_argument("emulate: no sizes");
    if (cfg.dt <= 0 || cfg.t_max < cfg.dt)
        throw std::invalid_argument("emulate: bad time grid");
    if (cfg.chis.size() < 2)
        throw std::invalid_argument("emulate: need a chi sweep");
    for (size_t i = 1; i < cfg.chis.size(); ++i)
        if (cfg.chis[i] <= cfg.chis[i - 1])
            throw std::invalid_argument("emulate: chis must ascend");
    if (cfg.chi_ref <= cfg.chis.back())
        throw std::invalid_argument("emulate: reference chi must top the sweep");

    const int n_times = int(std::lround(cfg.t_max / cfg.dt));
    std::vector<double> times(n_times);
    for (int k = 0; k < n_times; ++k) times[k] = cfg.dt * (k + 1);

    auto noise_rng = make_rng(cfg.seed, 777);
    std::normal_distribution<double> gauss(0.0, 1.0);

    EmulatedExperiment out;
    for (int n : cfg.sizes) {
        RydbergParams params;
        params.n_sites = n;
        Schedule sched;
        sched.t_total = cfg.t_max;
        sched.snapshot_times = times;
        EvolverConfig evo;
        evo.algorithm = Algorithm::lightcone;
        evo.dt = cfg.dt;
        evo.block_size = cfg.block_size;
        const Mps init = Mps::product_state(std::vector<int>(n, 0));

        evo.chi = cfg.chi_ref;
        const Trajectory ref = lightcone_evolve(init, params, sched, evo);

        // classical fidelity per (chi, time)
        std::vector<std::vector<double>> c(cfg.chis.size(),
                                           std::vector<double>(n_times));
        for (size_t ci = 0; ci < cfg.chis.size(); ++ci) {
            evo.chi = cfg.chis[ci];
            const Trajectory run = lightcone_evolve(init, params, sched, evo);
            for (int k = 0; k < n_times; ++k)
                c[ci][k] = std::norm(overlap(run.mps_snapshots[k].state,
                                             ref.mps_snapshots[k].state));
        }

        for (int k = 0; k < n_times; ++k) {
            FidelityCurve curve;
            curve.chis = cfg.chis;
            for (size_t ci = 0; ci < cfg.chis.size(); ++ci)
                curve.fidelities.push_back(c[ci][k]);
            // the reference run is exact by construction
            curve.chis.push_back(cfg.chi_ref);
            curve.fidelities.push_back(1.0);
            const int chi0 = chi_zero(curve).chi0;
            out.chi_zero_grid.push_back({n, times[k], chi0});

            const double fq = emulated_quantum_fidelity(cfg, n, times[k]);
            out.ground_truth.push_back(
                {n, times[k], chi0, 1.0, fq, cfg.sampling_sigma});

            for (size_t ci = 0; ci < cfg.chis.size(); ++ci) {
                TrainingPoint p;
                p.n_sites = n;
                p.time = times[k];
                p.chi = cfg.chis[ci];
                p.chi_tilde = std::log(double(p.chi)) / std::log(double(chi0));
                p.fd = fq * c[ci][k] + cfg.sampling_sigma * gauss(noise_rng);
                p.sigma = cfg.sampling_sigma;
                if (p.chi_tilde > cfg.chi_tilde_keep_max) continue;
                const bool censor = n > cfg.censor_above_n &&
                                    times[k] > cfg.censor_above_t &&
                                    p.chi_tilde > cfg.censor_chi_tilde;
                if (!censor) out.table.push_back(p);
            }
        }
    }
    return out;
}

}  // namespace rydbench
