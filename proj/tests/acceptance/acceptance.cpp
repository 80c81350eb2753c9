// Acceptance suite: one pass/fail line per criterion, exit code = number
// of failed criteria. Heavy runs stay at desk scale (N <= 3^5, K = 81).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <tribaker/config.hpp>
#include <tribaker/io.hpp>
#include <tribaker/pipeline.hpp>

namespace tb = tribaker;
using clock_type = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

void report(int criterion, bool pass, const std::string& detail, double elapsed) {
    std::printf("%s criterion %2d: %s [%.1f s]\n", pass ? "PASS" : "FAIL", criterion,
                detail.c_str(), elapsed);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void supplementary(const std::string& line) {
    std::printf("  note: %s\n", line.c_str());
    std::fflush(stdout);
}

double max_abs(const tb::Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Distance certificate for multiset closure under conjugation: the worst
// nearest-neighbour distance from conj(z) back into the spectrum. A
// nonzero value already rules closure out; it lower-bounds any one-to-one
// pairing.
double conjugation_pairing_defect(const std::vector<tb::cplx>& evals) {
    double worst = 0.0;
    for (const tb::cplx& z : evals) {
        const tb::cplx target = std::conj(z);
        double bd = 1e99;
        for (const tb::cplx& w : evals) bd = std::min(bd, std::abs(w - target));
        worst = std::max(worst, bd);
    }
    return worst;
}

// ---------- criteria ----------

void criterion_1() {
    const auto t0 = clock_type::now();
    bool ok = true;
    std::ostringstream msg;
    for (int n : {27, 243}) {
        const tb::Matrix u = tb::closed_baker(n);
        const tb::Matrix pi = tb::parity_operator(n);
        const double unit = max_abs(u.adjoint() * u - tb::Matrix::Identity(n, n));
        const double comm = max_abs(u * pi - pi * u);
        double mod_dev = 0.0;
        for (const tb::cplx& z : tb::eigendecompose(u, false).eigenvalues)
            mod_dev = std::max(mod_dev, std::abs(std::abs(z) - 1.0));
        ok = ok && unit < 1e-10 && comm < 1e-10 && mod_dev <= 1e-8;
        msg << "N=" << n << " unit=" << unit << " comm=" << comm << " |z|-1=" << mod_dev << "  ";
    }
    const double dt = seconds_since(t0);
    ok = ok && dt < 10.0;
    report(1, ok, "closed-map validity: " + msg.str(), dt);
}

void criterion_2() {
    const auto t0 = clock_type::now();
    const int n = 243;
    const tb::Matrix pi = tb::parity_operator(n);
    bool mod_ok = true, parity_ok = true, conj_ok = true;
    double worst_mod = 0.0, worst_comm = 0.0, worst_conj = 0.0, worst_adjoint = 0.0;
    for (auto shape : {tb::ReflectivityShape::step, tb::ReflectivityShape::sinusoidal}) {
        for (double r : {0.0, 0.001, 0.01, 0.1}) {
            const tb::ReflectivityProfile prof{shape, r};
            const tb::Matrix ut = tb::open_baker(n, prof);
            const auto evals = tb::eigendecompose(ut, false).eigenvalues;
            double zmax = 0.0;
            for (const tb::cplx& z : evals) zmax = std::max(zmax, std::abs(z));
            worst_mod = std::max(worst_mod, zmax);
            mod_ok = mod_ok && zmax <= 1.0 + 1e-10;
            const double comm = max_abs(ut * pi - pi * ut);
            worst_comm = std::max(worst_comm, comm);
            parity_ok = parity_ok && comm < 1e-10;
            const double defect = conjugation_pairing_defect(evals);
            worst_conj = std::max(worst_conj, defect);
            conj_ok = conj_ok && defect <= 1e-8;
            // spectrum of the adjoint against the conjugated spectrum: the
            // antiunitary identity that this quantization actually has
            const auto adj = tb::eigendecompose(ut.adjoint(), false).eigenvalues;
            std::vector<tb::cplx> conj_adj;
            for (const tb::cplx& z : adj) conj_adj.push_back(std::conj(z));
            std::vector<char> used(evals.size(), 0);
            for (const tb::cplx& z : evals) {
                double bd = 1e99;
                int best = -1;
                for (std::size_t k2 = 0; k2 < conj_adj.size(); ++k2) {
                    if (used[k2]) continue;
                    const double d = std::abs(conj_adj[k2] - z);
                    if (d < bd) {
                        bd = d;
                        best = static_cast<int>(k2);
                    }
                }
                used[best] = 1;
                worst_adjoint = std::max(worst_adjoint, bd);
            }
        }
    }
    const double dt = seconds_since(t0);
    const bool ok = mod_ok && parity_ok && conj_ok && dt < 120.0;
    std::ostringstream msg;
    msg << "contraction/symmetry: max|z|=" << worst_mod << " (ok=" << mod_ok << ")"
        << ", worst ||[U~,Pi]||=" << worst_comm << " (ok=" << parity_ok << ")"
        << ", conjugation-closure defect=" << worst_conj << " (ok=" << conj_ok << ")";
    report(2, ok, msg.str(), dt);
    if (!conj_ok) {
        supplementary("the spectrum of this quantization is not conjugation-closed: tr(U) is "
                      "complex, so the characteristic polynomial is not real; measured defect " +
                      tb::fmt_double(worst_conj));
        supplementary("the antiunitary identity that does hold, spec(U~^H) = conj(spec(U~)), "
                      "pairs to " + tb::fmt_double(worst_adjoint));
    }
}

void criterion_3() {
    const auto t0 = clock_type::now();
    const tb::ReflectivityProfile full{tb::ReflectivityShape::complete, 0.0};
    const double mean = tb::mean_survival_intensity(full, 5, 1000000, 20240515ull);
    const double expect = std::pow(2.0 / 3.0, 5);
    const double rel = std::abs(mean - expect) / expect;
    const double dt = seconds_since(t0);
    report(3, rel < 0.02 && dt < 30.0,
           "classical decay oracle: mean=" + tb::fmt_double(mean) + " vs (2/3)^5=" +
               tb::fmt_double(expect) + " rel=" + tb::fmt_double(rel),
           dt);
}

void criterion_4() {
    const auto t0 = clock_type::now();
    const int n = 27;
    const tb::ReflectivityProfile prof{tb::ReflectivityShape::constant, 0.5};
    const tb::ResonanceSet set = tb::eigendecompose(tb::open_baker(n, prof), true);
    tb::Matrix sum = tb::Matrix::Zero(n, n);
    int used = 0;
    for (int j = 0; j < n; ++j) {
        if (set.defective[j]) continue;
        sum += set.right.col(j) * set.left.col(j).adjoint() /
               set.left.col(j).dot(set.right.col(j));
        ++used;
    }
    const double dev = max_abs(sum - tb::Matrix::Identity(n, n));
    report(4, dev < 1e-6 && used == n,
           "biorthogonal completeness: max|sum h_j - 1|=" + tb::fmt_double(dev) + " over " +
               std::to_string(used) + "/27 projectors",
           seconds_since(t0));
}

struct Case5 {
    tb::ReflectivityShape shape;
    double r;
    double nu_c;
};

void criteria_5(const std::vector<tb::OrbitGeometry>& inside) {
    const auto t0 = clock_type::now();
    const int n = 243, k = 81;
    const int tau = tb::ehrenfest_tau(n);
    bool ok = true;
    std::ostringstream msg;
    msg << "overlap O(exact, semiclassical) at K=81:";
    for (const Case5& c : {Case5{tb::ReflectivityShape::step, 0.01, 0.81},
                           Case5{tb::ReflectivityShape::step, 0.1, 0.81},
                           Case5{tb::ReflectivityShape::sinusoidal, 0.01, 0.91},
                           Case5{tb::ReflectivityShape::sinusoidal, 0.1, 0.91}}) {
        const tb::ReflectivityProfile prof{c.shape, c.r};
        const tb::Matrix ut = tb::open_baker(n, prof);
        const tb::ResonanceSet exact = tb::eigendecompose(ut, true);
        const tb::SemiclassicalBasis basis = tb::build_basis(inside, ut, tau);
        const tb::GeneralizedSolution sol =
            tb::solve_generalized(basis.interaction, basis.overlap, 1e-10, true);
        const tb::SemiclassicalSpectrum semi = tb::extract_semiclassical(basis, sol, ut);
        const tb::HusimiGrid qe = tb::accumulate_q(exact, c.nu_c, k, "exact");
        const tb::HusimiGrid qs = tb::semiclassical_q(semi, c.nu_c, k);
        const auto o = tb::overlap_o(qe, qs);
        const bool case_ok = o && *o > 0.99;
        ok = ok && case_ok;
        msg << " " << tb::to_string(c.shape) << "/R=" << c.r << ": O="
            << (o ? tb::fmt_double(*o) : std::string("undefined"));
        if (semi.disk_violations > 0)
            supplementary(tb::to_string(c.shape) + " R=" + tb::fmt_double(c.r) + ": " +
                          std::to_string(semi.disk_violations) +
                          " Ritz values left the unit disk beyond the slack and were excluded");
    }
    const double dt = seconds_since(t0);
    report(5, ok && dt < 1800.0, msg.str(), dt);
}

void criteria_6_and_7(const std::vector<tb::OrbitGeometry>& inside) {
    const auto t0 = clock_type::now();
    const int n = 243;
    const int tau = tb::ehrenfest_tau(n);
    const double eps = 1e-3, target = 0.8, sigma_cut = 1e-10;
    const std::vector<double> r_grid{0.0, 0.001, 0.01, 0.05, 0.1};

    tb::ScanSettings step_settings;
    step_settings.n = n;
    step_settings.nu_c = 0.81;
    step_settings.epsilon = eps;
    step_settings.target_p = target;
    step_settings.sigma_cut = sigma_cut;
    step_settings.tau = tau;
    tb::ScanSettings sin_settings = step_settings;
    sin_settings.nu_c = 0.91;

    bool step_ok = true, compare_ok = true;
    std::vector<int> step_nsf;
    std::ostringstream table;
    for (double r : r_grid) {
        const auto row =
            tb::nsf_scan_point({tb::ReflectivityShape::step, r}, r, inside, step_settings);
        step_ok = step_ok && row.reached && row.n_sf <= 232;
        step_nsf.push_back(row.n_sf);
        table << " R=" << r << ": step " << row.n_sf << (row.reached ? "" : "(!)");
    }
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        const auto row = tb::nsf_scan_point({tb::ReflectivityShape::sinusoidal, r_grid[i]},
                                            r_grid[i], inside, sin_settings);
        compare_ok = compare_ok && step_nsf[i] <= row.n_sf;
        table << "/sin " << row.n_sf << (row.reached ? "" : "(!)");
    }
    const double dt6 = seconds_since(t0);
    report(6, step_ok && compare_ok,
           "performance claim: step reaches P>=0.8 for all sampled R with N_SF<=232 and needs "
           "no more scars than sinusoidal --" +
               table.str(),
           dt6);

    // sigma_cut stability band, logged alongside the scan
    {
        const tb::ReflectivityProfile prof{tb::ReflectivityShape::step, 0.01};
        const tb::Matrix ut = tb::open_baker(n, prof);
        const auto exact = tb::eigendecompose(ut, false).eigenvalues;
        const tb::SemiclassicalBasis basis = tb::build_basis(inside, ut, tau);
        double pmin = 1e9, pmax = -1e9;
        std::ostringstream line;
        for (double sc : {1e-8, 1e-7, 1e-6, 1e-5}) {
            const auto sol = tb::solve_generalized(basis.interaction, basis.overlap, sc, false);
            const auto rep = tb::performance(exact, sol.eigenvalues, 0.81, eps);
            pmin = std::min(pmin, rep.p);
            pmax = std::max(pmax, rep.p);
            line << " P(" << sc << ")=" << rep.p;
        }
        supplementary("sigma_cut stability over [1e-8,1e-5] at step R=0.01:" + line.str() +
                      "; spread=" + tb::fmt_double(pmax - pmin) +
                      (pmax - pmin < 0.05 ? " (within 0.05)" : " (exceeds the 0.05 band)"));
    }

    // criterion 7: adding the ranked outside orbits to the full repeller
    // basis must not move P by 0.1 at any sampled R
    const auto t7 = clock_type::now();
    const tb::ReflectivityProfile rank_prof{tb::ReflectivityShape::step, 0.01};
    const tb::MeasureGrid mu = tb::continuous_repeller(
        tb::compute_measure(rank_prof, tb::EvolveDirection::forward, 10, 81, 20, 20240515ull),
        tb::compute_measure(rank_prof, tb::EvolveDirection::backward, 10, 81, 20, 20240515ull));
    std::vector<tb::OrbitGeometry> augmented = inside;
    for (const auto& ranked : tb::rank_outside_orbits(tb::outside_orbits(7), mu, 5))
        augmented.push_back(ranked.geometry);

    bool ok7 = true;
    std::ostringstream msg7;
    msg7 << "outside-orbit robustness (step, N_max^outPO=5):";
    for (double r : r_grid) {
        const tb::ReflectivityProfile prof{tb::ReflectivityShape::step, r};
        const tb::Matrix ut = tb::open_baker(n, prof);
        const auto exact = tb::eigendecompose(ut, false).eigenvalues;
        const tb::SemiclassicalBasis bi = tb::build_basis(inside, ut, tau);
        const tb::SemiclassicalBasis ba = tb::build_basis(augmented, ut, tau);
        const auto si = tb::solve_generalized(bi.interaction, bi.overlap, sigma_cut, false);
        const auto sa = tb::solve_generalized(ba.interaction, ba.overlap, sigma_cut, false);
        const double pi = tb::performance(exact, si.eigenvalues, 0.81, eps).p;
        const double pa = tb::performance(exact, sa.eigenvalues, 0.81, eps).p;
        ok7 = ok7 && std::abs(pa - pi) < 0.1;
        msg7 << " R=" << r << ": dP=" << tb::fmt_double(pa - pi);
    }
    report(7, ok7, msg7.str(), seconds_since(t7));
}

void criterion_8() {
    const auto t0 = clock_type::now();
    const tb::ReflectivityProfile full{tb::ReflectivityShape::complete, 0.0};
    const auto e243 = tb::eigendecompose(tb::open_baker(243, full), false).eigenvalues;
    const auto e81 = tb::eigendecompose(tb::open_baker(81, full), false).eigenvalues;
    const auto curve = tb::dloc_curve(e243, e81, tb::uniform_grid(0.0, 0.99, 0.01));
    const double window = tb::longest_band_window(curve, 0.63, 0.15);
    report(8, window >= 0.1,
           "desk-scale Weyl scaling: d_loc stays in 0.63+-0.15 over a window of width " +
               tb::fmt_double(window) + " (need >= 0.1)",
           seconds_since(t0));
}

void criterion_9() {
    const auto t0 = clock_type::now();
    const auto grid = tb::uniform_grid(0.3, 0.8, 0.01);
    auto curve_for = [&](const tb::ReflectivityProfile& prof) {
        const auto en = tb::eigendecompose(tb::open_baker(243, prof), false).eigenvalues;
        const auto en3 = tb::eigendecompose(tb::open_baker(81, prof), false).eigenvalues;
        return tb::dloc_curve(en, en3, grid);
    };
    const double tv_complete =
        tb::total_variation(curve_for({tb::ReflectivityShape::complete, 0.0}));
    bool ok = true;
    std::ostringstream msg;
    msg << "spectral smoothness: TV(complete)=" << tb::fmt_double(tv_complete);
    for (auto shape : {tb::ReflectivityShape::step, tb::ReflectivityShape::sinusoidal}) {
        for (double r : {0.01, 0.1}) {
            const double tv = tb::total_variation(curve_for({shape, r}));
            ok = ok && tv < tv_complete;
            msg << ", TV(" << tb::to_string(shape) << " R=" << r << ")=" << tb::fmt_double(tv);
        }
    }
    report(9, ok, msg.str(), seconds_since(t0));
}

std::string slurp(const tb::fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_10(const std::string& cli) {
    const auto t0 = clock_type::now();
    const tb::fs::path base = tb::fs::temp_directory_path() / "tribaker_acceptance_det";
    tb::fs::remove_all(base);
    bool ok = true;
    std::string how;
    if (!cli.empty()) {
        how = "via the CLI";
        auto run = [&](const std::string& sub, const tb::fs::path& out) {
            const std::string cmd = cli + " " + sub + " --output " + out.string() +
                                    " >/dev/null 2>&1";
            const int rc = std::system(cmd.c_str());
            if (rc != 0)
                supplementary("command failed (rc=" + std::to_string(rc) + "): " + cmd);
            return rc == 0;
        };
        const std::string classical = "classical-repeller --K 27 --n-ic 5 --t 5 --seed 777";
        const std::string spectrum = "exact-spectrum --N 27 --R 0.05";
        ok = ok && run(classical, base / "a") && run(classical, base / "b");
        ok = ok && run(spectrum, base / "sa") && run(spectrum, base / "sb");
        for (const char* f : {"forward.csv", "backward.csv", "intersection.csv", "forward.json",
                              "config.resolved.ini"}) {
            const bool same = slurp(base / "a" / f) == slurp(base / "b" / f) &&
                              !slurp(base / "a" / f).empty();
            if (!same) supplementary(std::string("mismatch or empty: ") + f);
            ok = ok && same;
        }
        ok = ok && slurp(base / "sa" / "spectrum.json") == slurp(base / "sb" / "spectrum.json") &&
             !slurp(base / "sa" / "spectrum.json").empty();
    } else {
        how = "library-level (no --cli given)";
        tb::RunConfig cfg;
        cfg.k = 27;
        cfg.n_ic = 5;
        cfg.t = 5;
        const std::string hash = tb::config_hash(cfg);
        for (const char* sub : {"a", "b"}) {
            const tb::MeasureGrid fwd = tb::compute_measure(
                cfg.profile, tb::EvolveDirection::forward, cfg.t, cfg.k, cfg.n_ic, cfg.seed);
            tb::write_measure_grid(base / sub, "forward", fwd, cfg.profile, hash);
        }
        ok = slurp(base / "a" / "forward.csv") == slurp(base / "b" / "forward.csv");
    }
    report(10, ok, "determinism " + how + ": repeated runs byte-identical", seconds_since(t0));
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    int only = 0;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
        if (std::string(argv[i]) == "--only") only = std::atoi(argv[i + 1]);
    }
    auto want = [only](int c) { return only == 0 || only == c; };

    const auto inside = tb::repeller_orbits(7);

    if (want(1)) criterion_1();
    if (want(2)) criterion_2();
    if (want(3)) criterion_3();
    if (want(4)) criterion_4();
    if (want(5)) criteria_5(inside);
    if (want(6) || want(7)) criteria_6_and_7(inside);
    if (want(8)) criterion_8();
    if (want(9)) criterion_9();
    if (want(10)) criterion_10(cli);

    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
