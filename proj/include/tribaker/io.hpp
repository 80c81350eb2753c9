#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tribaker/config.hpp"
#include "tribaker/husimi.hpp"
#include "tribaker/measure.hpp"
#include "tribaker/orbits.hpp"
#include "tribaker/pipeline.hpp"
#include "tribaker/spectral.hpp"

namespace tribaker {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest round-trip formatting; identical inputs give identical bytes.
inline std::string fmt_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Write-to-temp plus rename; readers never see a half-written file.
inline void atomic_write(const fs::path& path, const std::string& data) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw io_error("cannot open for writing: " + tmp.string());
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out) throw io_error("short write: " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- K x K grids (classical measures and Husimi distributions) ----
// CSV is row-major, K rows by K columns, row index = q cell; the first
// line is a comment carrying the config hash. A JSON sidecar holds the
// run metadata.

inline std::string grid_csv(const std::vector<double>& values, int k, const std::string& hash) {
    std::string out = "# config_hash=" + hash + "\n";
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            out += fmt_double(values[static_cast<std::size_t>(a) * k + b]);
            out += (b + 1 == k) ? '\n' : ',';
        }
    }
    return out;
}

inline void write_measure_grid(const fs::path& dir, const std::string& name,
                               const MeasureGrid& grid, const ReflectivityProfile& profile,
                               const std::string& hash) {
    atomic_write(dir / (name + ".csv"), grid_csv(grid.values, grid.k, hash));
    json meta;
    meta["K"] = grid.k;
    meta["t"] = grid.t;
    meta["N_ic"] = grid.n_ic;
    meta["seed"] = grid.seed;
    meta["direction"] = to_string(grid.direction);
    meta["zero_flag"] = grid.zero_flag;
    meta["profile"] = {{"shape", to_string(profile.shape)},
                       {"R", profile.r},
                       {"A", profile.a},
                       {"B", profile.b}};
    meta["config_hash"] = hash;
    atomic_write(dir / (name + ".json"), meta.dump(2) + "\n");
}

inline std::vector<double> read_grid_csv(const fs::path& path, int expected_k) {
    std::istringstream in(read_file(path));
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
    }
    if (expected_k > 0 &&
        values.size() != static_cast<std::size_t>(expected_k) * expected_k)
        throw io_error("grid size mismatch in " + path.string());
    return values;
}

inline void write_husimi_grid(const fs::path& dir, const std::string& name, const HusimiGrid& grid,
                              const ReflectivityProfile& profile, const std::string& hash) {
    atomic_write(dir / (name + ".csv"), grid_csv(grid.values, grid.k, hash));
    json meta;
    meta["K"] = grid.k;
    meta["source"] = grid.source;
    meta["nu_c"] = grid.nu_c;
    meta["profile"] = {{"shape", to_string(profile.shape)},
                       {"R", profile.r},
                       {"A", profile.a},
                       {"B", profile.b}};
    meta["config_hash"] = hash;
    atomic_write(dir / (name + ".json"), meta.dump(2) + "\n");
}

// ---- complex matrices / vectors ----
// Raw row-major (re, im) doubles with a JSON header.

inline void write_complex_matrix(const fs::path& dir, const std::string& name, const Matrix& m,
                                 const std::string& label, const ReflectivityProfile& profile,
                                 const std::string& hash) {
    std::string blob;
    blob.resize(static_cast<std::size_t>(m.rows()) * m.cols() * 2 * sizeof(double));
    double* out = reinterpret_cast<double*>(blob.data());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            *out++ = m(i, j).real();
            *out++ = m(i, j).imag();
        }
    atomic_write(dir / (name + ".bin"), blob);
    json meta;
    meta["rows"] = m.rows();
    meta["cols"] = m.cols();
    meta["label"] = label;
    meta["layout"] = "row-major complex128 (re,im)";
    meta["profile"] = {{"shape", to_string(profile.shape)},
                       {"R", profile.r},
                       {"A", profile.a},
                       {"B", profile.b}};
    meta["config_hash"] = hash;
    atomic_write(dir / (name + ".json"), meta.dump(2) + "\n");
}

inline Matrix read_complex_matrix(const fs::path& dir, const std::string& name,
                                  const std::string& expected_hash = "") {
    const json meta = json::parse(read_file(dir / (name + ".json")));
    if (!expected_hash.empty() && meta.at("config_hash").get<std::string>() != expected_hash)
        throw config_error("config hash mismatch for " + name +
                           "; refusing to mix artifacts from different configs");
    const auto rows = meta.at("rows").get<Eigen::Index>();
    const auto cols = meta.at("cols").get<Eigen::Index>();
    const std::string blob = read_file(dir / (name + ".bin"));
    if (blob.size() != static_cast<std::size_t>(rows) * cols * 2 * sizeof(double))
        throw io_error("binary size mismatch for " + name);
    Matrix m(rows, cols);
    const double* in = reinterpret_cast<const double*>(blob.data());
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double re = *in++;
            const double im = *in++;
            m(i, j) = cplx(re, im);
        }
    return m;
}

// ---- spectra ----

inline void write_spectrum(const fs::path& dir, const std::string& name, const ResonanceSet& set,
                           const RunConfig& cfg, const std::string& hash) {
    json doc;
    doc["N"] = set.n;
    doc["profile"] = {{"shape", to_string(cfg.profile.shape)},
                      {"R", cfg.profile.r},
                      {"A", cfg.profile.a},
                      {"B", cfg.profile.b}};
    doc["nu_c_default"] = cfg.resolved_nu_c();
    doc["defective_count"] = set.defective_count;
    doc["max_residual"] = set.max_residual;
    doc["config_hash"] = hash;
    json evs = json::array();
    for (const cplx& z : set.eigenvalues) evs.push_back({z.real(), z.imag()});
    doc["eigenvalues"] = evs;
    atomic_write(dir / (name + ".json"), doc.dump(2) + "\n");
}

inline std::vector<cplx> read_spectrum(const fs::path& dir, const std::string& name,
                                       const std::string& expected_hash = "") {
    const json doc = json::parse(read_file(dir / (name + ".json")));
    if (!expected_hash.empty() && doc.at("config_hash").get<std::string>() != expected_hash)
        throw config_error("config hash mismatch for " + name +
                           "; refusing to mix artifacts from different configs");
    std::vector<cplx> evals;
    for (const auto& z : doc.at("eigenvalues")) evals.emplace_back(z[0].get<double>(), z[1].get<double>());
    return evals;
}

// ---- orbits ----

inline json orbit_json(const OrbitGeometry& g) {
    json o;
    o["symbols"] = g.orbit.word();
    o["period"] = g.orbit.period();
    o["in_repeller"] = g.in_repeller;
    json pts = json::array();
    for (int j = 0; j < g.orbit.period(); ++j)
        pts.push_back({std::to_string(g.q_num[j]) + "/" + std::to_string(g.den),
                       std::to_string(g.p_num[j]) + "/" + std::to_string(g.den)});
    o["points"] = pts;
    o["step_actions"] = g.step_actions;
    o["total_action"] = g.total_action;
    o["action_convention"] = to_string(g.convention);
    return o;
}

inline void write_orbits(const fs::path& dir, const std::string& name,
                         const std::vector<OrbitGeometry>& orbits, const std::string& hash) {
    json doc;
    doc["config_hash"] = hash;
    json arr = json::array();
    for (const auto& g : orbits) arr.push_back(orbit_json(g));
    doc["orbits"] = arr;
    atomic_write(dir / (name + ".json"), doc.dump(2) + "\n");
}

// ---- N_SF scan ----

inline std::string scan_csv(const std::vector<NsfScanRow>& rows, const std::string& hash) {
    std::string out = "# config_hash=" + hash + "\n";
    out += "R,profile,nu_c,epsilon,N,N_SF,N_SF_over_N,P_reached,reached_flag\n";
    for (const auto& r : rows) {
        out += fmt_double(r.r) + "," + r.shape + "," + fmt_double(r.nu_c) + "," +
               fmt_double(r.epsilon) + "," + std::to_string(r.n) + "," + std::to_string(r.n_sf) +
               "," + fmt_double(r.n_sf_over_n) + "," + fmt_double(r.p_reached) + "," +
               (r.reached ? "1" : "0") + "\n";
    }
    return out;
}

// ---- d_loc ----

inline std::string dloc_csv(const std::vector<std::tuple<std::string, double, int, std::vector<DlocPoint>>>& blocks,
                            const std::string& hash) {
    // blocks: (shape, R, N, curve with counts against N/3)
    std::string out = "# config_hash=" + hash + "\n";
    out += "profile,R,N,nu_c,M_N,M_N_over_3,d_loc,defined\n";
    for (const auto& [shape, r, n, curve] : blocks) {
        for (const auto& pt : curve) {
            out += shape + "," + fmt_double(r) + "," + std::to_string(n) + "," +
                   fmt_double(pt.nu_c) + "," + std::to_string(pt.m_n) + "," +
                   std::to_string(pt.m_n3) + ",";
            out += pt.d_loc ? fmt_double(*pt.d_loc) : std::string("nan");
            out += pt.d_loc ? ",1\n" : ",0\n";
        }
    }
    return out;
}

inline void echo_config(const RunConfig& cfg, const std::string& hash) {
    atomic_write(fs::path(cfg.output) / "config.resolved.ini",
                 "# config_hash=" + hash + "\n" + cfg.resolved_text());
}

}  // namespace tribaker
