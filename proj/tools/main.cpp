#include <cstdio>
#include <exception>
#include <new>

#include "common.hpp"

using namespace rbcli;

namespace rbcli {

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    const size_t c1 = text.find(':');
    if (c1 != std::string::npos) {
        const size_t c2 = text.find(':', c1 + 1);
        if (c2 == std::string::npos)
            throw std::invalid_argument("range must be first:last:step, got " + text);
        const double first = std::stod(text.substr(0, c1));
        const double last = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        const double step = std::stod(text.substr(c2 + 1));
        if (step <= 0 || last < first)
            throw std::invalid_argument("bad range " + text);
        for (double v = first; v <= last + 1e-9 * step; v += step) out.push_back(v);
        return out;
    }
    size_t at = 0;
    while (at <= text.size()) {
        size_t comma = text.find(',', at);
        if (comma == std::string::npos) comma = text.size();
        try {
            out.push_back(std::stod(text.substr(at, comma - at)));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad number list: " + text);
        }
        at = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument("empty number list");
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_number_list(text)) {
        const int k = int(std::lround(v));
        if (std::abs(v - k) > 1e-9)
            throw std::invalid_argument("expected integers, got " + text);
        out.push_back(k);
    }
    return out;
}

}  // namespace rbcli

int main(int argc, char** argv) {
    CLI::App app{"Rydberg-chain quench simulation and benchmarking toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    Context ctx;
    for (int i = 0; i < argc; ++i) {
        if (i) ctx.invocation += ' ';
        ctx.invocation += argv[i];
    }

    app.add_option("--seed", ctx.seed, "Base RNG seed; all streams derive from it")
        ->capture_default_str();
    app.add_option("--threads", ctx.threads, "Worker thread cap for parallel stages")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--out", ctx.out_dir, "Output directory (created if missing)")
        ->capture_default_str();
    app.set_config("--config", "", "Read options from a TOML/INI file");

    register_simulate(app, ctx);
    register_sample(app, ctx);
    register_benchmark(app, ctx);
    register_entanglement(app, ctx);
    register_noise(app, ctx);
    register_infer(app, ctx);
    register_pipeline(app, ctx);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const data_error& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return exit_data;
    } catch (const std::bad_alloc&) {
        std::fprintf(stderr, "numerical failure: out of memory\n");
        return exit_numerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return exit_numerical;
    }
    return exit_ok;
}
