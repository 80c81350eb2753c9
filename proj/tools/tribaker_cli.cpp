// Command line front end: deterministic pipelines over the continuously
// open tribaker map, emitting plot-ready CSV/JSON artifacts.

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include <tribaker/config.hpp>
#include <tribaker/io.hpp>
#include <tribaker/pipeline.hpp>

namespace tb = tribaker;

namespace {

struct Overrides {
    std::optional<std::string> config_path;
    std::optional<int> n;
    std::optional<std::string> output;
    std::optional<std::string> shape;
    std::optional<double> r, a, b;
    std::optional<int> t, k, n_ic;
    std::optional<std::uint64_t> seed;
    std::optional<double> nu_c;
    std::optional<int> l_max, tau, n_out_po;
    std::optional<std::string> theta, action, ordering;
    std::optional<double> sigma_cut, epsilon, target_p, residual_tol, disk_slack;
};

void add_common_options(CLI::App& cmd, Overrides& ov) {
    cmd.add_option("--config", ov.config_path, "config file (key = value with [sections])");
    cmd.add_option("--output", ov.output, "output directory");
    cmd.add_option("--N", ov.n, "Hilbert dimension (power of 3)");
    cmd.add_option("--shape", ov.shape, "reflectivity shape: step|sinusoidal|constant|complete");
    cmd.add_option("--R", ov.r, "reflectivity floor R in [0,1]");
    cmd.add_option("--A", ov.a, "step steepness");
    cmd.add_option("--B", ov.b, "step flank position");
    cmd.add_option("--t", ov.t, "classical evolution steps");
    cmd.add_option("--K", ov.k, "grid resolution (classical and Husimi)");
    cmd.add_option("--n-ic", ov.n_ic, "initial conditions per cell");
    cmd.add_option("--seed", ov.seed, "RNG seed");
    cmd.add_option("--nu-c", ov.nu_c, "long-lived modulus threshold");
    cmd.add_option("--l-max", ov.l_max, "max orbit period");
    cmd.add_option("--tau", ov.tau, "scar propagation horizon (0 = Ehrenfest)");
    cmd.add_option("--theta-convention", ov.theta, "exclusive|inclusive");
    cmd.add_option("--action-convention", ov.action, "quantum_phase|generating_function");
    cmd.add_option("--n-out-po", ov.n_out_po, "outside orbits added to the basis");
    cmd.add_option("--sigma-cut", ov.sigma_cut, "relative SVD cutoff of the overlap matrix");
    cmd.add_option("--epsilon", ov.epsilon, "performance matching radius");
    cmd.add_option("--target-p", ov.target_p, "performance target for N_SF scans");
    cmd.add_option("--ordering", ov.ordering, "basis ordering: repeller_first|period_first");
    cmd.add_option("--residual-tol", ov.residual_tol, "semiclassical eigenstate residual gate");
    cmd.add_option("--disk-slack", ov.disk_slack, "allowed |z| excess over the unit disk");
}

tb::RunConfig resolve_config(const Overrides& ov) {
    tb::RunConfig cfg;
    if (ov.config_path) cfg = tb::load_config_file(*ov.config_path);
    if (ov.n) cfg.n = *ov.n;
    if (ov.output) cfg.output = *ov.output;
    if (ov.shape) cfg.profile.shape = tb::reflectivity_shape_from_string(*ov.shape);
    if (ov.r) cfg.profile.r = *ov.r;
    if (ov.a) cfg.profile.a = *ov.a;
    if (ov.b) cfg.profile.b = *ov.b;
    if (ov.t) cfg.t = *ov.t;
    if (ov.k) cfg.k = *ov.k;
    if (ov.n_ic) cfg.n_ic = *ov.n_ic;
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.nu_c) cfg.nu_c = *ov.nu_c;
    if (ov.l_max) cfg.l_max = *ov.l_max;
    if (ov.tau) cfg.tau = *ov.tau;
    if (ov.theta)
        cfg.theta = *ov.theta == "inclusive" ? tb::ThetaConvention::inclusive
                                             : tb::ThetaConvention::exclusive;
    if (ov.action) cfg.action = tb::action_convention_from_string(*ov.action);
    if (ov.n_out_po) cfg.n_out_po = *ov.n_out_po;
    if (ov.sigma_cut) cfg.sigma_cut = *ov.sigma_cut;
    if (ov.epsilon) cfg.epsilon = *ov.epsilon;
    if (ov.target_p) cfg.target_p = *ov.target_p;
    if (ov.ordering) cfg.ordering = tb::basis_ordering_from_string(*ov.ordering);
    if (ov.residual_tol) cfg.residual_tol = *ov.residual_tol;
    if (ov.disk_slack) cfg.disk_slack = *ov.disk_slack;
    cfg.validate();
    if (cfg.n > tb::max_eigen_dim)
        throw tb::resource_error("N exceeds the 3^7 resource guard");
    return cfg;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) throw tb::config_error("empty list: " + s);
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (double v : parse_double_list(s)) out.push_back(static_cast<int>(v));
    return out;
}

// ---- commands ----

void cmd_classical_repeller(const tb::RunConfig& cfg) {
    const std::string hash = tb::config_hash(cfg);
    const tb::MeasureGrid fwd =
        tb::compute_measure(cfg.profile, tb::EvolveDirection::forward, cfg.t, cfg.k, cfg.n_ic, cfg.seed);
    const tb::MeasureGrid bwd =
        tb::compute_measure(cfg.profile, tb::EvolveDirection::backward, cfg.t, cfg.k, cfg.n_ic, cfg.seed);
    const tb::MeasureGrid inter = tb::continuous_repeller(fwd, bwd);
    tb::echo_config(cfg, hash);
    tb::write_measure_grid(cfg.output, "forward", fwd, cfg.profile, hash);
    tb::write_measure_grid(cfg.output, "backward", bwd, cfg.profile, hash);
    tb::write_measure_grid(cfg.output, "intersection", inter, cfg.profile, hash);
    if (inter.zero_flag) std::cerr << "warning: intersection measure is identically zero\n";
    std::cout << "classical-repeller: wrote forward/backward/intersection grids (K=" << cfg.k
              << ", t=" << cfg.t << ") to " << cfg.output << "\n";
}

void cmd_exact_spectrum(const tb::RunConfig& cfg, bool save_vectors, bool save_operator) {
    const std::string hash = tb::config_hash(cfg);
    const tb::Matrix u = tb::open_baker(cfg.n, cfg.profile);
    const tb::ResonanceSet set = tb::eigendecompose(u, save_vectors);
    tb::echo_config(cfg, hash);
    tb::write_spectrum(cfg.output, "spectrum", set, cfg, hash);
    if (save_vectors) {
        tb::write_complex_matrix(cfg.output, "vectors_right", set.right, "PsiR", cfg.profile, hash);
        tb::write_complex_matrix(cfg.output, "vectors_left", set.left, "PsiL", cfg.profile, hash);
    }
    if (save_operator) tb::write_complex_matrix(cfg.output, "operator", u, "Utilde", cfg.profile, hash);
    std::cout << "exact-spectrum: N=" << cfg.n << ", M(nu_c=" << cfg.resolved_nu_c()
              << ")=" << tb::count_longlived(set, cfg.resolved_nu_c())
              << ", defective=" << set.defective_count << "\n";
}

void cmd_dloc(const tb::RunConfig& cfg, const std::vector<int>& n_list,
              const std::vector<double>& r_list, double nu_lo, double nu_hi, double nu_step) {
    const std::string hash = tb::config_hash(cfg);
    const auto grid = tb::uniform_grid(nu_lo, nu_hi, nu_step);
    std::vector<std::tuple<std::string, double, int, std::vector<tb::DlocPoint>>> blocks;
    for (int n : n_list) {
        if (!tb::is_power_of_three(n) || n < 9)
            throw tb::config_error("dloc N values must be powers of 3 with N/3 >= 3");
        if (n > tb::max_eigen_dim) throw tb::resource_error("dloc: N exceeds the 3^7 guard");
        for (double r : r_list) {
            tb::ReflectivityProfile prof = cfg.profile;
            prof.r = r;
            prof.validate();
            const auto ev_n = tb::eigendecompose(tb::open_baker(n, prof), false).eigenvalues;
            const auto ev_n3 = tb::eigendecompose(tb::open_baker(n / 3, prof), false).eigenvalues;
            blocks.emplace_back(tb::to_string(prof.shape), r, n, tb::dloc_curve(ev_n, ev_n3, grid));
        }
    }
    tb::echo_config(cfg, hash);
    tb::atomic_write(tb::fs::path(cfg.output) / "dloc.csv", tb::dloc_csv(blocks, hash));
    std::cout << "dloc: wrote " << blocks.size() << " curve blocks to " << cfg.output << "/dloc.csv\n";
}

void cmd_scar_basis(const tb::RunConfig& cfg) {
    const std::string hash = tb::config_hash(cfg);
    const auto orbits = tb::select_basis_orbits(cfg.l_max, cfg.n_out_po, cfg.action, cfg.profile,
                                                cfg.t, cfg.k, cfg.n_ic, cfg.seed);
    const tb::Matrix u = tb::open_baker(cfg.n, cfg.profile);
    const tb::SemiclassicalBasis basis =
        tb::build_basis(orbits, u, cfg.resolved_tau(), cfg.theta, cfg.ordering);
    tb::echo_config(cfg, hash);
    tb::write_orbits(cfg.output, "orbits", orbits, hash);
    tb::write_complex_matrix(cfg.output, "scar_right", basis.right_states, "psiR", cfg.profile, hash);
    tb::write_complex_matrix(cfg.output, "scar_left", basis.left_states, "psiL", cfg.profile, hash);
    tb::write_complex_matrix(cfg.output, "interaction", basis.interaction, "A", cfg.profile, hash);
    tb::write_complex_matrix(cfg.output, "overlap", basis.overlap, "S", cfg.profile, hash);

    tb::json meta;
    meta["config_hash"] = hash;
    meta["tau"] = cfg.resolved_tau();
    meta["basis_size"] = basis.size();
    meta["excluded_pairs"] = basis.excluded;
    tb::json scars = tb::json::array();
    for (const auto& sf : basis.scars)
        scars.push_back({{"orbit", sf.orbit.word()},
                         {"m", sf.m},
                         {"quasienergy", sf.quasienergy},
                         {"tau", sf.tau},
                         {"from_repeller", sf.from_repeller}});
    meta["scars"] = scars;
    tb::atomic_write(tb::fs::path(cfg.output) / "scars.json", meta.dump(2) + "\n");
    std::cout << "scar-basis: " << basis.size() << " scar pairs (excluded " << basis.excluded
              << ") written to " << cfg.output << "\n";
}

void cmd_semiclassical(const tb::RunConfig& cfg, bool with_scan, const std::vector<double>& r_grid,
                       int husimi_k) {
    const std::string hash = tb::config_hash(cfg);
    const double nu_c = cfg.resolved_nu_c();
    const tb::Matrix u = tb::open_baker(cfg.n, cfg.profile);
    const tb::ResonanceSet exact = tb::eigendecompose(u, true);
    const auto orbits = tb::select_basis_orbits(cfg.l_max, cfg.n_out_po, cfg.action, cfg.profile,
                                                cfg.t, cfg.k, cfg.n_ic, cfg.seed);
    const tb::SemiclassicalBasis basis =
        tb::build_basis(orbits, u, cfg.resolved_tau(), cfg.theta, cfg.ordering);
    const tb::GeneralizedSolution sol =
        tb::solve_generalized(basis.interaction, basis.overlap, cfg.sigma_cut, true);
    const tb::SemiclassicalSpectrum semi =
        tb::extract_semiclassical(basis, sol, u, cfg.residual_tol, cfg.disk_slack);
    const tb::PerformanceReport rep =
        tb::performance(exact.eigenvalues, sol.eigenvalues, nu_c, cfg.epsilon);

    tb::echo_config(cfg, hash);
    tb::write_spectrum(cfg.output, "exact_spectrum", exact, cfg, hash);

    tb::json sc;
    sc["config_hash"] = hash;
    sc["rank"] = sol.rank;
    sc["basis_size"] = basis.size();
    sc["disk_violations"] = semi.disk_violations;
    tb::json evs = tb::json::array();
    for (std::size_t j = 0; j < semi.eigenvalues.size(); ++j)
        evs.push_back({{"z", {semi.eigenvalues[j].real(), semi.eigenvalues[j].imag()}},
                       {"residual", semi.residuals[j]},
                       {"physical", static_cast<bool>(semi.physical[j])}});
    sc["eigenvalues"] = evs;
    tb::atomic_write(tb::fs::path(cfg.output) / "semiclassical_spectrum.json", sc.dump(2) + "\n");

    tb::json perf;
    perf["config_hash"] = hash;
    perf["P"] = rep.p;
    perf["defined"] = rep.defined;
    perf["matched"] = rep.matched;
    perf["exact_longlived"] = rep.exact_longlived;
    perf["nu_c"] = nu_c;
    perf["epsilon"] = cfg.epsilon;
    perf["N_SF"] = basis.size();
    tb::json pairs = tb::json::array();
    for (const auto& [ze, zs] : rep.pairs)
        pairs.push_back({{ze.real(), ze.imag()}, {zs.real(), zs.imag()}});
    perf["pairs"] = pairs;
    tb::atomic_write(tb::fs::path(cfg.output) / "performance.json", perf.dump(2) + "\n");

    const tb::HusimiGrid q_exact = tb::accumulate_q(exact, nu_c, husimi_k, "exact");
    const tb::HusimiGrid q_semi = tb::semiclassical_q(semi, nu_c, husimi_k);
    tb::write_husimi_grid(cfg.output, "q_exact", q_exact, cfg.profile, hash);
    tb::write_husimi_grid(cfg.output, "q_semiclassical", q_semi, cfg.profile, hash);

    const auto o = tb::overlap_o(q_exact, q_semi);
    tb::json ov;
    ov["config_hash"] = hash;
    ov["O"] = o ? tb::json(*o) : tb::json();
    ov["K"] = husimi_k;
    ov["nu_c"] = nu_c;
    tb::atomic_write(tb::fs::path(cfg.output) / "overlap.json", ov.dump(2) + "\n");

    if (with_scan) {
        tb::ScanSettings s;
        s.n = cfg.n;
        s.l_max = cfg.l_max;
        s.tau = cfg.resolved_tau();
        s.theta = cfg.theta;
        s.action = cfg.action;
        s.ordering = cfg.ordering;
        s.nu_c = nu_c;
        s.epsilon = cfg.epsilon;
        s.target_p = cfg.target_p;
        s.sigma_cut = cfg.sigma_cut;
        std::vector<tb::NsfScanRow> rows;
        for (double r : r_grid) rows.push_back(tb::nsf_scan_point(cfg.profile, r, orbits, s));
        tb::atomic_write(tb::fs::path(cfg.output) / "nsf_scan.csv", tb::scan_csv(rows, hash));
    }
    std::cout << "semiclassical: P=" << rep.p << " (" << rep.matched << "/" << rep.exact_longlived
              << "), O=" << (o ? std::to_string(*o) : std::string("undefined")) << "\n";
}

void cmd_husimi(const tb::RunConfig& cfg, int husimi_k, int projector_index,
                const std::string& from_dir) {
    const std::string hash = tb::config_hash(cfg);
    const double nu_c = cfg.resolved_nu_c();
    tb::ResonanceSet set;
    if (!from_dir.empty()) {
        set.n = cfg.n;
        set.eigenvalues = tb::read_spectrum(from_dir, "spectrum", hash);
        set.right = tb::read_complex_matrix(from_dir, "vectors_right", hash);
        set.left = tb::read_complex_matrix(from_dir, "vectors_left", hash);
        set.defective.assign(set.eigenvalues.size(), 0);
    } else {
        set = tb::eigendecompose(tb::open_baker(cfg.n, cfg.profile), true);
    }
    tb::echo_config(cfg, hash);
    if (projector_index >= 0) {
        if (projector_index >= static_cast<int>(set.eigenvalues.size()))
            throw tb::config_error("projector index out of range");
        const tb::HusimiGrid h = tb::projector_husimi(set.right.col(projector_index),
                                                      set.left.col(projector_index), husimi_k);
        tb::write_husimi_grid(cfg.output, "h_" + std::to_string(projector_index), h, cfg.profile,
                              hash);
        std::cout << "husimi: wrote projector grid j=" << projector_index << "\n";
        return;
    }
    const tb::HusimiGrid q = tb::accumulate_q(set, nu_c, husimi_k, "exact");
    tb::write_husimi_grid(cfg.output, "q_exact", q, cfg.profile, hash);
    std::cout << "husimi: wrote accumulated grid above nu_c=" << nu_c << "\n";
}

void cmd_performance_scan(const tb::RunConfig& cfg, const std::vector<double>& r_grid) {
    const std::string hash = tb::config_hash(cfg);
    const auto orbits = tb::select_basis_orbits(cfg.l_max, cfg.n_out_po, cfg.action, cfg.profile,
                                                cfg.t, cfg.k, cfg.n_ic, cfg.seed);
    tb::ScanSettings s;
    s.n = cfg.n;
    s.l_max = cfg.l_max;
    s.tau = cfg.resolved_tau();
    s.theta = cfg.theta;
    s.action = cfg.action;
    s.ordering = cfg.ordering;
    s.nu_c = cfg.resolved_nu_c();
    s.epsilon = cfg.epsilon;
    s.target_p = cfg.target_p;
    s.sigma_cut = cfg.sigma_cut;
    std::vector<tb::NsfScanRow> rows;
    for (double r : r_grid) {
        rows.push_back(tb::nsf_scan_point(cfg.profile, r, orbits, s));
        std::cout << "R=" << r << ": N_SF=" << rows.back().n_sf
                  << (rows.back().reached ? "" : " (target not reached)") << "\n";
    }
    tb::echo_config(cfg, hash);
    tb::atomic_write(tb::fs::path(cfg.output) / "nsf_scan.csv", tb::scan_csv(rows, hash));
    std::cout << "performance-scan: wrote " << rows.size() << " rows to " << cfg.output
              << "/nsf_scan.csv\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"continuously open quantum tribaker map toolkit"};
    app.require_subcommand(1);

    Overrides ov;
    bool save_vectors = false, save_operator = false, with_scan = false;
    std::string n_list_s = "243,81", r_list_s, r_grid_s = "0,0.001,0.01,0.05,0.1";
    double nu_lo = 0.0, nu_hi = 0.99, nu_step = 0.01;
    int husimi_k = 0;  // 0 -> config K
    int projector_index = -1;
    std::string from_dir;

    auto* c1 = app.add_subcommand("classical-repeller",
                                  "forward/backward measures and their intersection");
    add_common_options(*c1, ov);

    auto* c2 = app.add_subcommand("exact-spectrum", "resonances of the open propagator");
    add_common_options(*c2, ov);
    c2->add_flag("--save-vectors", save_vectors, "persist left/right eigenvectors");
    c2->add_flag("--save-operator", save_operator, "persist the propagator matrix");

    auto* c3 = app.add_subcommand("dloc", "local dimension d_loc(nu_c) scans");
    add_common_options(*c3, ov);
    c3->add_option("--n-list", n_list_s, "comma list of N values (each paired with N/3)");
    c3->add_option("--r-list", r_list_s, "comma list of R values (default: config R)");
    c3->add_option("--nu-lo", nu_lo, "nu_c grid start");
    c3->add_option("--nu-hi", nu_hi, "nu_c grid end");
    c3->add_option("--nu-step", nu_step, "nu_c grid step");

    auto* c4 = app.add_subcommand("scar-basis", "periodic orbits and scar-function basis");
    add_common_options(*c4, ov);

    auto* c5 = app.add_subcommand("semiclassical",
                                  "semiclassical spectrum, performance, Husimi grids, overlap");
    add_common_options(*c5, ov);
    c5->add_flag("--with-scan", with_scan, "also run the N_SF/N scan over --r-grid");
    c5->add_option("--r-grid", r_grid_s, "comma list of R values for the scan");
    c5->add_option("--husimi-K", husimi_k, "Husimi grid resolution (default: config K)");

    auto* c6 = app.add_subcommand("husimi", "Husimi grids of exact resonances");
    add_common_options(*c6, ov);
    c6->add_option("--husimi-K", husimi_k, "Husimi grid resolution (default: config K)");
    c6->add_option("--j", projector_index, "single projector index (|z| descending order)");
    c6->add_option("--from", from_dir, "reuse a persisted exact-spectrum directory");

    auto* c7 = app.add_subcommand("performance-scan", "N_SF/N needed to reach the target P vs R");
    add_common_options(*c7, ov);
    c7->add_option("--r-grid", r_grid_s, "comma list of R values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const tb::RunConfig cfg = resolve_config(ov);
        const int hk = husimi_k > 0 ? husimi_k : cfg.k;
        if (c1->parsed()) cmd_classical_repeller(cfg);
        if (c2->parsed()) cmd_exact_spectrum(cfg, save_vectors, save_operator);
        if (c3->parsed()) {
            std::vector<double> r_list =
                r_list_s.empty() ? std::vector<double>{cfg.profile.r} : parse_double_list(r_list_s);
            cmd_dloc(cfg, parse_int_list(n_list_s), r_list, nu_lo, nu_hi, nu_step);
        }
        if (c4->parsed()) cmd_scar_basis(cfg);
        if (c5->parsed()) cmd_semiclassical(cfg, with_scan, parse_double_list(r_grid_s), hk);
        if (c6->parsed()) cmd_husimi(cfg, hk, projector_index, from_dir);
        if (c7->parsed()) cmd_performance_scan(cfg, parse_double_list(r_grid_s));
    } catch (const tb::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const tb::resource_error& e) {
        std::cerr << "resource guard: " << e.what() << "\n";
        return 4;
    } catch (const tb::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
