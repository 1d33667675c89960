#include "rydbench/mps_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace rydbench {

namespace {

constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& out, uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

uint32_t read_u32(std::istream& in, const std::string& what) {
    uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw std::runtime_error("truncated file while reading " + what);
    return v;
}

void write_magic(std::ostream& out, const char magic[4]) {
    out.write(magic, 4);
}

void expect_magic(std::istream& in, const char magic[4],
                  const std::string& path) {
    char got[4] = {};
    in.read(got, 4);
    if (!in || std::memcmp(got, magic, 4) != 0)
        throw std::runtime_error(path + ": not a " +
                                 std::string(magic, 4) + " container");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

}  // namespace

void save_mps(const std::string& path, const Mps& state) {
    const int n = state.n_sites();
    for (int i = 0; i < n; ++i)
        if (state.tensor(i).dim_phys() != 2)
            throw std::invalid_argument(
                "save_mps: site " + std::to_string(i) +
                " has a fused physical index; split it before saving");

    Mps gauged = state;
    gauged.canonicalize(0);

    std::ofstream out = open_out(path);
    write_magic(out, "MPS1");
    write_u32(out, kVersion);
    write_u32(out, uint32_t(n));
    for (int cut = 0; cut < n - 1; ++cut)
        write_u32(out, uint32_t(gauged.bond_dim(cut)));
    for (int i = 0; i < n; ++i) {
        const Tensor3& t = gauged.tensor(i);
        out.write(reinterpret_cast<const char*>(t.data()),
                  std::streamsize(sizeof(cplx)) * t.dim_left() * t.dim_phys() *
                      t.dim_right());
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Mps load_mps(const std::string& path) {
    std::ifstream in = open_in(path);
    expect_magic(in, "MPS1", path);
    const uint32_t version = read_u32(in, "version");
    if (version != kVersion)
        throw std::runtime_error(path + ": unsupported container version " +
                                 std::to_string(version));
    const uint32_t n = read_u32(in, "site count");
    if (n < 1 || n > 4096)
        throw std::runtime_error(path + ": implausible site count " +
                                 std::to_string(n));
    std::vector<uint32_t> bonds(n - 1);
    for (auto& b : bonds) {
        b = read_u32(in, "bond dimension");
        if (b < 1) throw std::runtime_error(path + ": zero bond dimension");
    }

    std::vector<Tensor3> tensors;
    tensors.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        const int dl = i == 0 ? 1 : int(bonds[i - 1]);
        const int dr = i == n - 1 ? 1 : int(bonds[i]);
        Tensor3 t(dl, 2, dr);
        in.read(reinterpret_cast<char*>(t.data()),
                std::streamsize(sizeof(cplx)) * dl * 2 * dr);
        if (!in) throw std::runtime_error("truncated tensor data: " + path);
        tensors.push_back(std::move(t));
    }
    return Mps::from_tensors(std::move(tensors), 0);
}

void save_snapshot(const std::string& path, const Mps& state,
                   const SnapshotMeta& meta) {
    save_mps(path, state);
    nlohmann::json j;
    j["time"] = meta.time;
    j["chi"] = meta.chi;
    j["f_svd"] = meta.f_svd;
    j["seed"] = meta.seed;
    std::ofstream out(path + ".json", std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + ".json");
    out << j.dump(2) << '\n';
}

LoadedSnapshot load_snapshot(const std::string& path) {
    LoadedSnapshot snap{load_mps(path), {}};
    std::ifstream in(path + ".json");
    if (!in) throw std::runtime_error("missing metadata record " + path + ".json");
    nlohmann::json j = nlohmann::json::parse(in);
    snap.meta.time = j.at("time").get<double>();
    snap.meta.chi = j.at("chi").get<int>();
    snap.meta.f_svd = j.at("f_svd").get<double>();
    snap.meta.seed = j.at("seed").get<uint64_t>();
    return snap;
}

void save_dense_matrix(const std::string& path, const Matrix& m) {
    std::ofstream out = open_out(path);
    write_magic(out, "MPD1");
    write_u32(out, kVersion);
    write_u32(out, uint32_t(m.rows()));
    write_u32(out, uint32_t(m.cols()));
    // Eigen stores column-major; the container is row-major.
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const cplx v = m(r, c);
            out.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Matrix load_dense_matrix(const std::string& path) {
    std::ifstream in = open_in(path);
    expect_magic(in, "MPD1", path);
    const uint32_t version = read_u32(in, "version");
    if (version != kVersion)
        throw std::runtime_error(path + ": unsupported container version " +
                                 std::to_string(version));
    const uint32_t rows = read_u32(in, "rows");
    const uint32_t cols = read_u32(in, "cols");
    if (rows < 1 || cols < 1)
        throw std::runtime_error(path + ": empty matrix");
    Matrix m(rows, cols);
    for (uint32_t r = 0; r < rows; ++r)
        for (uint32_t c = 0; c < cols; ++c) {
            cplx v;
            in.read(reinterpret_cast<char*>(&v), sizeof v);
            if (!in) throw std::runtime_error("truncated matrix data: " + path);
            m(r, c) = v;
        }
    return m;
}

}  // namespace rydbench
