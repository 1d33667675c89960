#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

namespace rbcli {

// Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 data error.
// Config problems surface as std::invalid_argument (or CLI11 parse errors),
// broken or missing input files as data_error, and everything else that goes
// wrong at runtime as a numerical failure.
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;
constexpr int exit_data = 4;

// One cycle of the driven chain takes about 145 ns of lab time; commands
// quote both so times stay comparable with the hardware literature.
constexpr double ns_per_cycle = 145.0;

inline std::string cycles_text(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g cycles (%.4g ns)", t, t * ns_per_cycle);
    return buf;
}

struct Context {
    uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = ".";
    std::string config_path;
    std::string invocation;
};

inline uint64_t fnv1a(const char* data, size_t n, uint64_t h = 1469598103934665603ull) {
    for (size_t i = 0; i < n; ++i) {
        h ^= uint64_t(uint8_t(data[i]));
        h *= 1099511628211ull;
    }
    return h;
}

inline uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot checksum " + path);
    uint64_t h = 1469598103934665603ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        h = fnv1a(buf, size_t(in.gcount()), h);
    return h;
}

// Records what a command ran and what it wrote. Every output file is listed
// with size and checksum so an artifact directory is regenerable and
// verifiable from the manifest alone.
class Manifest {
public:
    Manifest(const Context& ctx, std::string command)
        : ctx_(ctx), command_(std::move(command)),
          start_(std::chrono::steady_clock::now()) {
        std::filesystem::create_directories(ctx_.out_dir);
    }

    // Registers `name` as an output and returns its full path.
    std::string path(const std::string& name) {
        const std::string p = (std::filesystem::path(ctx_.out_dir) / name).string();
        outputs_.push_back(p);
        return p;
    }

    void note(const std::string& key, const nlohmann::json& value) {
        notes_[key] = value;
    }

    // Call after all output streams are closed.
    void write() const {
        nlohmann::json j;
        j["command"] = command_;
        j["invocation"] = ctx_.invocation;
        j["seed"] = ctx_.seed;
        j["threads"] = ctx_.threads;
        if (!ctx_.config_path.empty()) {
            j["config"] = ctx_.config_path;
            char hex[32];
            std::snprintf(hex, sizeof hex, "%016llx",
                          (unsigned long long)fnv1a_file(ctx_.config_path));
            j["config_fnv1a"] = hex;
        }
        j["versions"] = {{"rydbench", "0.1.0"},
                         {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                       std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                       std::to_string(EIGEN_MINOR_VERSION)},
                         {"cli11", CLI11_VERSION}};
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        j["wall_seconds"] = std::chrono::duration<double>(elapsed).count();
        j["outputs"] = nlohmann::json::array();
        for (const auto& p : outputs_) {
            char hex[32];
            std::snprintf(hex, sizeof hex, "%016llx",
                          (unsigned long long)fnv1a_file(p));
            j["outputs"].push_back({{"file", p},
                                    {"bytes", std::filesystem::file_size(p)},
                                    {"fnv1a", hex}});
        }
        if (!notes_.empty()) j["notes"] = notes_;
        const auto mp = std::filesystem::path(ctx_.out_dir) / "manifest.json";
        std::ofstream out(mp, std::ios::trunc);
        if (!out) throw data_error("cannot write " + mp.string());
        out << j.dump(2) << '\n';
    }

private:
    const Context& ctx_;
    std::string command_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> outputs_;
    nlohmann::json notes_;
};

// Numeric CSV reader. Skips blank lines and a leading non-numeric header;
// every remaining line must carry exactly `columns` comma-separated numbers.
inline std::vector<std::vector<double>> load_csv(const std::string& path,
                                                 size_t columns) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        size_t at = 0;
        bool numeric = true;
        while (at <= line.size()) {
            size_t comma = line.find(',', at);
            if (comma == std::string::npos) comma = line.size();
            try {
                size_t used = 0;
                row.push_back(std::stod(line.substr(at, comma - at), &used));
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
            at = comma + 1;
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;  // header
            }
            throw data_error(path + ": non-numeric row: " + line);
        }
        first = false;
        if (row.size() != columns)
            throw data_error(path + ": expected " + std::to_string(columns) +
                             " columns, got " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw data_error(path + ": no data rows");
    return rows;
}

inline std::ofstream open_text(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw data_error("cannot open " + path + " for writing");
    return out;
}

// Comma-separated list options arrive as strings so ranges like 0.5:8:0.5
// and explicit lists can share a flag.
std::vector<double> parse_number_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

void register_simulate(CLI::App& app, Context& ctx);
void register_sample(CLI::App& app, Context& ctx);
void register_benchmark(CLI::App& app, Context& ctx);
void register_entanglement(CLI::App& app, Context& ctx);
void register_noise(CLI::App& app, Context& ctx);
void register_infer(CLI::App& app, Context& ctx);
void register_pipeline(CLI::App& app, Context& ctx);

}  // namespace rbcli
