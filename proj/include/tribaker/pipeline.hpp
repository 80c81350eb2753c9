#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tribaker/husimi.hpp"
#include "tribaker/measure.hpp"
#include "tribaker/semiclassical.hpp"

namespace tribaker {

// Orbit pool for a scar basis: the full repeller set up to l_max, plus
// the n_out_po outside orbits carrying the most continuous-repeller
// measure (measured on the classical intersection grid).
inline std::vector<OrbitGeometry> select_basis_orbits(int l_max, int n_out_po,
                                                      ActionConvention conv,
                                                      const ReflectivityProfile& profile, int t,
                                                      int k, int n_ic, std::uint64_t seed) {
    std::vector<OrbitGeometry> orbits = repeller_orbits(l_max, conv);
    if (n_out_po > 0) {
        const MeasureGrid mu = continuous_repeller(
            compute_measure(profile, EvolveDirection::forward, t, k, n_ic, seed),
            compute_measure(profile, EvolveDirection::backward, t, k, n_ic, seed));
        for (const auto& ranked : rank_outside_orbits(outside_orbits(l_max, conv), mu, n_out_po))
            orbits.push_back(ranked.geometry);
    }
    return orbits;
}

// Semiclassical eigenstates lifted back to Hilbert space, with the
// diagnostics needed to separate genuine resonance approximations from
// regularization artifacts. Ritz values of the reduced problem can leave
// the unit disk and carry large eigenequation residuals when the overlap
// matrix is cut deep; such directions are flagged unphysical and kept out
// of the Husimi accumulation (they still appear in the eigenvalue list).
struct SemiclassicalSpectrum {
    std::vector<cplx> eigenvalues;
    Matrix right;  // n x rank
    Matrix left;
    std::vector<double> residuals;
    std::vector<char> physical;
    int disk_violations = 0;  // |z| beyond the monitored unit-disk slack
};

inline constexpr double default_residual_tol = 0.5;
inline constexpr double default_disk_slack = 0.05;

inline SemiclassicalSpectrum extract_semiclassical(const SemiclassicalBasis& basis,
                                                   const GeneralizedSolution& sol,
                                                   const Matrix& u_open,
                                                   double residual_tol = default_residual_tol,
                                                   double disk_slack = default_disk_slack,
                                                   int prefix = -1) {
    SemiclassicalSpectrum out;
    out.eigenvalues = sol.eigenvalues;
    auto [rs, ls] = semiclassical_states(basis, sol, prefix);
    out.right = std::move(rs);
    out.left = std::move(ls);
    const int k = static_cast<int>(out.eigenvalues.size());
    out.residuals.resize(k);
    out.physical.assign(k, 1);
    for (int j = 0; j < k; ++j) {
        const Vector x = out.right.col(j);
        const double nrm = x.norm();
        const double resid =
            nrm > 0 ? (u_open * x - out.eigenvalues[j] * x).norm() / nrm : 1.0;
        out.residuals[j] = resid;
        const double mod = std::abs(out.eigenvalues[j]);
        if (mod > 1.0 + disk_slack) ++out.disk_violations;
        const cplx lr = out.left.col(j).dot(out.right.col(j));
        if (sol.defective[j] || resid > residual_tol || mod > 1.0 + disk_slack ||
            std::abs(lr) < 1e-10)
            out.physical[j] = 0;
    }
    return out;
}

// Semiclassical quantum continuous repeller: accumulated projectors of the
// physical semiclassical resonances above nu_c.
inline HusimiGrid semiclassical_q(const SemiclassicalSpectrum& spec, double nu_c, int k) {
    std::vector<int> cols;
    for (std::size_t j = 0; j < spec.eigenvalues.size(); ++j)
        if (spec.physical[j] && std::abs(spec.eigenvalues[j]) > nu_c + modulus_snap_tol)
            cols.push_back(static_cast<int>(j));
    if (cols.empty())
        throw numerical_error("semiclassical_q: no physical semiclassical resonances above nu_c");
    Matrix rights(spec.right.rows(), cols.size()), lefts(spec.left.rows(), cols.size());
    std::vector<cplx> weights(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
        rights.col(i) = spec.right.col(cols[i]);
        lefts.col(i) = spec.left.col(cols[i]);
        weights[i] = 1.0 / lefts.col(i).dot(rights.col(i));
    }
    return husimi_accumulate(rights, lefts, weights, k, "semiclassical", nu_c);
}

// ---- spectral-scaling diagnostics ----

struct DlocPoint {
    double nu_c = 0.0;
    int m_n = 0;
    int m_n3 = 0;
    std::optional<double> d_loc;
};

inline std::vector<double> uniform_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || hi < lo) throw config_error("bad grid bounds");
    std::vector<double> g;
    for (double x = lo; x <= hi + 1e-12; x += step) g.push_back(x);
    return g;
}

inline std::vector<DlocPoint> dloc_curve(const std::vector<cplx>& evals_n,
                                         const std::vector<cplx>& evals_n3,
                                         const std::vector<double>& nu_grid) {
    std::vector<DlocPoint> curve;
    curve.reserve(nu_grid.size());
    for (double nu : nu_grid) {
        DlocPoint pt;
        pt.nu_c = nu;
        pt.m_n = count_longlived(evals_n, nu);
        pt.m_n3 = count_longlived(evals_n3, nu);
        pt.d_loc = local_dimension(pt.m_n, pt.m_n3);
        curve.push_back(pt);
    }
    return curve;
}

// Total variation over consecutive defined points.
inline double total_variation(const std::vector<DlocPoint>& curve) {
    double acc = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (curve[i].d_loc && curve[i - 1].d_loc)
            acc += std::abs(*curve[i].d_loc - *curve[i - 1].d_loc);
    return acc;
}

// Longest contiguous stretch (in nu_c) where d_loc stays within
// band_center +- band_halfwidth; returns the stretch width.
inline double longest_band_window(const std::vector<DlocPoint>& curve, double band_center,
                                  double band_halfwidth) {
    double best = 0.0;
    std::size_t i = 0;
    while (i < curve.size()) {
        if (!curve[i].d_loc || std::abs(*curve[i].d_loc - band_center) > band_halfwidth) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < curve.size() && curve[j + 1].d_loc &&
               std::abs(*curve[j + 1].d_loc - band_center) <= band_halfwidth)
            ++j;
        best = std::max(best, curve[j].nu_c - curve[i].nu_c);
        i = j + 1;
    }
    return best;
}

// ---- N_SF scan ----

struct NsfScanRow {
    double r = 0.0;
    std::string shape;
    double nu_c = 0.0;
    double epsilon = 0.0;
    int n = 0;
    int n_sf = 0;
    double n_sf_over_n = 0.0;
    double p_reached = 0.0;
    bool reached = false;
    int basis_size = 0;
};

struct ScanSettings {
    int n = 243;
    int l_max = 7;
    int tau = 0;  // 0 -> Ehrenfest default
    ThetaConvention theta = ThetaConvention::exclusive;
    ActionConvention action = ActionConvention::quantum_phase;
    BasisOrdering ordering = BasisOrdering::repeller_first;
    double nu_c = 0.81;
    double epsilon = 1e-3;
    double target_p = 0.8;
    double sigma_cut = 1e-10;
};

// One scan point: exact spectrum and scar basis are rebuilt for the given
// R, then the smallest prefix reaching the target is located.
inline NsfScanRow nsf_scan_point(ReflectivityProfile profile, double r,
                                 const std::vector<OrbitGeometry>& orbits,
                                 const ScanSettings& s) {
    profile.r = r;
    profile.validate();
    const Matrix u = open_baker(s.n, profile);
    const ResonanceSet exact = eigendecompose(u, false);
    const int tau = s.tau > 0 ? s.tau : ehrenfest_tau(s.n);
    const SemiclassicalBasis basis = build_basis(orbits, u, tau, s.theta, s.ordering);
    const PrefixSearchResult res =
        smallest_prefix_for_target(basis, exact.eigenvalues, s.nu_c, s.epsilon, s.target_p,
                                   s.sigma_cut);
    NsfScanRow row;
    row.r = r;
    row.shape = to_string(profile.shape);
    row.nu_c = s.nu_c;
    row.epsilon = s.epsilon;
    row.n = s.n;
    row.n_sf = res.n_sf;
    row.n_sf_over_n = static_cast<double>(res.n_sf) / s.n;
    row.p_reached = res.p_reached;
    row.reached = res.reached;
    row.basis_size = basis.size();
    return row;
}

}  // namespace tribaker
