#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tribaker/common.hpp"
#include "tribaker/orbits.hpp"
#include "tribaker/reflectivity.hpp"
#include "tribaker/scar.hpp"
#include "tribaker/semiclassical.hpp"

namespace tribaker {

// Fully resolved run configuration. Plain-text "key = value" files with
// [section] headers; every command line flag overrides the file. The
// resolved form (defaults included) is echoed next to the outputs and
// hashed into every file the run writes.
struct RunConfig {
    int n = 243;
    std::string output = "out";

    ReflectivityProfile profile{ReflectivityShape::step, 0.01, 120.0, 0.63};

    // classical
    int t = 10;
    int k = 243;
    int n_ic = 100;
    std::uint64_t seed = 20240515;

    // spectral; nu_c < 0 selects the per-shape default (0.81 step-like,
    // 0.91 sinusoidal)
    double nu_c = -1.0;

    // scar
    int l_max = 7;
    int tau = 0;  // 0 -> round(ln N / ln 3)
    ThetaConvention theta = ThetaConvention::exclusive;
    ActionConvention action = ActionConvention::quantum_phase;
    int n_out_po = 0;

    // semiclassical
    double sigma_cut = 1e-10;
    double epsilon = 1e-3;
    double target_p = 0.8;
    BasisOrdering ordering = BasisOrdering::repeller_first;
    double residual_tol = 0.5;
    double disk_slack = 0.05;

    double resolved_nu_c() const {
        if (nu_c >= 0.0) return nu_c;
        return profile.shape == ReflectivityShape::sinusoidal ? 0.91 : 0.81;
    }

    int resolved_tau() const { return tau > 0 ? tau : ehrenfest_tau(n); }

    void validate() const {
        if (n < 3 || !is_power_of_three(n)) throw config_error("N must be a power of 3, N >= 3");
        profile.validate();
        if (t < 0) throw config_error("classical.t must be >= 0");
        if (k < 3) throw config_error("classical.K must be >= 3");
        if (n_ic < 1) throw config_error("classical.N_ic must be >= 1");
        if (nu_c > 1.0) throw config_error("spectral.nu_c must lie in [0,1]");
        if (l_max < 1 || l_max > 12) throw config_error("scar.L_max must lie in [1,12]");
        if (tau < 0) throw config_error("scar.tau must be >= 0 (0 = Ehrenfest default)");
        if (n_out_po < 0) throw config_error("scar.N_out_PO must be >= 0");
        if (sigma_cut < 0.0 || sigma_cut >= 1.0) throw config_error("semiclassical.sigma_cut out of range");
        if (epsilon <= 0.0) throw config_error("semiclassical.epsilon must be positive");
        if (target_p <= 0.0 || target_p > 1.0) throw config_error("semiclassical.target_P out of (0,1]");
        if (residual_tol <= 0.0) throw config_error("semiclassical.residual_tol must be positive");
        if (disk_slack < 0.0) throw config_error("semiclassical.disk_slack must be >= 0");
        if (output.empty()) throw config_error("output directory must be set");
    }

    // Canonical text form; also what gets hashed. Key order is fixed. The
    // output directory is orchestration, not computation, and stays out so
    // artifacts are byte-identical wherever they are written.
    std::string resolved_text() const {
        std::ostringstream os;
        os.precision(17);
        os << "N = " << n << "\n\n";
        os << "[profile]\n";
        os << "shape = " << to_string(profile.shape) << "\n";
        os << "R = " << profile.r << "\n";
        os << "A = " << profile.a << "\n";
        os << "B = " << profile.b << "\n\n";
        os << "[classical]\n";
        os << "t = " << t << "\n";
        os << "K = " << k << "\n";
        os << "N_ic = " << n_ic << "\n";
        os << "seed = " << seed << "\n\n";
        os << "[spectral]\n";
        os << "nu_c = " << resolved_nu_c() << "\n\n";
        os << "[scar]\n";
        os << "L_max = " << l_max << "\n";
        os << "tau = " << resolved_tau() << "\n";
        os << "theta_convention = "
           << (theta == ThetaConvention::exclusive ? "exclusive" : "inclusive") << "\n";
        os << "action_convention = " << to_string(action) << "\n";
        os << "N_out_PO = " << n_out_po << "\n\n";
        os << "[semiclassical]\n";
        os << "sigma_cut = " << sigma_cut << "\n";
        os << "epsilon = " << epsilon << "\n";
        os << "target_P = " << target_p << "\n";
        os << "ordering = " << to_string(ordering) << "\n";
        os << "residual_tol = " << residual_tol << "\n";
        os << "disk_slack = " << disk_slack << "\n";
        return os.str();
    }
};

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string config_hash(const RunConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(cfg.resolved_text())));
    return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

// key/value pairs keyed as "section.key" ("" section for the preamble)
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw config_error("unterminated section header, line " +
                                                       std::to_string(lineno));
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("expected key = value, line " + std::to_string(lineno));
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw config_error("empty key, line " + std::to_string(lineno));
        kv[section.empty() ? key : section + "." + key] = val;
    }
    return kv;
}

inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& val) {
    auto as_int = [&](const std::string& v) {
        try {
            return std::stoi(v);
        } catch (...) {
            throw config_error("bad integer for " + key + ": " + v);
        }
    };
    auto as_double = [&](const std::string& v) {
        try {
            return std::stod(v);
        } catch (...) {
            throw config_error("bad number for " + key + ": " + v);
        }
    };
    if (key == "N") cfg.n = as_int(val);
    else if (key == "output") cfg.output = val;
    else if (key == "profile.shape") cfg.profile.shape = reflectivity_shape_from_string(val);
    else if (key == "profile.R") cfg.profile.r = as_double(val);
    else if (key == "profile.A") cfg.profile.a = as_double(val);
    else if (key == "profile.B") cfg.profile.b = as_double(val);
    else if (key == "classical.t") cfg.t = as_int(val);
    else if (key == "classical.K") cfg.k = as_int(val);
    else if (key == "classical.N_ic") cfg.n_ic = as_int(val);
    else if (key == "classical.seed") cfg.seed = std::stoull(val);
    else if (key == "spectral.nu_c") cfg.nu_c = as_double(val);
    else if (key == "scar.L_max") cfg.l_max = as_int(val);
    else if (key == "scar.tau") cfg.tau = as_int(val);
    else if (key == "scar.theta_convention")
        cfg.theta = val == "inclusive" ? ThetaConvention::inclusive
                                       : (val == "exclusive" ? ThetaConvention::exclusive
                                                             : throw config_error(
                                                                   "unknown theta convention: " + val));
    else if (key == "scar.action_convention") cfg.action = action_convention_from_string(val);
    else if (key == "scar.N_out_PO") cfg.n_out_po = as_int(val);
    else if (key == "semiclassical.sigma_cut") cfg.sigma_cut = as_double(val);
    else if (key == "semiclassical.epsilon") cfg.epsilon = as_double(val);
    else if (key == "semiclassical.target_P") cfg.target_p = as_double(val);
    else if (key == "semiclassical.ordering") cfg.ordering = basis_ordering_from_string(val);
    else if (key == "semiclassical.residual_tol") cfg.residual_tol = as_double(val);
    else if (key == "semiclassical.disk_slack") cfg.disk_slack = as_double(val);
    else throw config_error("unknown config key: " + key);
}

inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    for (const auto& [key, val] : parse_config_text(text)) apply_config_entry(cfg, key, val);
    return cfg;
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace tribaker
