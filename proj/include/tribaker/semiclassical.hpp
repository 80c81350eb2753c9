#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <optional>
#include <vector>

#include "tribaker/common.hpp"
#include "tribaker/orbits.hpp"
#include "tribaker/scar.hpp"
#include "tribaker/spectral.hpp"

namespace tribaker {

// Ordered scar-function basis with its interaction and overlap matrices.
// The ordering (period ascending, repeller orbits before outside ones,
// canonical symbols, then m) is what defines the N_SF prefixes of the
// scan, so it is fixed here and nowhere else.
struct SemiclassicalBasis {
    std::vector<ScarFunction> scars;
    Matrix right_states;  // n x B, scar right vectors as columns
    Matrix left_states;   // n x B
    Matrix interaction;   // A_nm = <l_n| U~ |r_m>
    Matrix overlap;       // S_nm = <l_n|r_m>
    int excluded = 0;     // unusable scar pairs dropped during the build

    int size() const { return static_cast<int>(scars.size()); }
    int dim() const { return static_cast<int>(right_states.rows()); }
};

// Basis ordering policy. repeller_first keeps the whole repeller block
// ahead of any outside orbit, so N_SF prefixes never trade repeller scars
// for outside ones; period_first interleaves strictly by period.
enum class BasisOrdering { repeller_first, period_first };

inline std::string to_string(BasisOrdering o) {
    return o == BasisOrdering::repeller_first ? "repeller_first" : "period_first";
}

inline BasisOrdering basis_ordering_from_string(const std::string& s) {
    if (s == "repeller_first") return BasisOrdering::repeller_first;
    if (s == "period_first") return BasisOrdering::period_first;
    throw config_error("unknown basis ordering: " + s);
}

inline void sort_basis_orbits(std::vector<OrbitGeometry>& orbits,
                              BasisOrdering ordering = BasisOrdering::repeller_first) {
    std::stable_sort(orbits.begin(), orbits.end(),
                     [ordering](const OrbitGeometry& a, const OrbitGeometry& b) {
                         if (ordering == BasisOrdering::repeller_first && a.in_repeller != b.in_repeller)
                             return a.in_repeller;
                         if (a.orbit.period() != b.orbit.period())
                             return a.orbit.period() < b.orbit.period();
                         if (a.in_repeller != b.in_repeller) return a.in_repeller;
                         return a.orbit.symbols < b.orbit.symbols;
                     });
}

// All periodic orbits of the fully open repeller (itineraries over {0,2})
// up to the given period.
inline std::vector<OrbitGeometry> repeller_orbits(
    int l_max, ActionConvention conv = ActionConvention::quantum_phase) {
    std::vector<OrbitGeometry> out;
    for (const auto& orb : enumerate_orbits(l_max, {0, 2})) out.push_back(orbit_geometry(orb, conv));
    sort_basis_orbits(out);
    return out;
}

// Orbits that leave the repeller (their itinerary visits the opening).
inline std::vector<OrbitGeometry> outside_orbits(
    int l_max, ActionConvention conv = ActionConvention::quantum_phase) {
    std::vector<OrbitGeometry> out;
    for (const auto& orb : enumerate_orbits(l_max, {0, 1, 2}))
        if (!orb.in_repeller()) out.push_back(orbit_geometry(orb, conv));
    sort_basis_orbits(out);
    return out;
}

// Builds every (orbit, m) scar pair for the selected orbits and assembles
// the interaction and overlap matrices in the basis ordering.
inline SemiclassicalBasis build_basis(std::vector<OrbitGeometry> orbits, const Matrix& u_open,
                                      int tau, ThetaConvention conv = ThetaConvention::exclusive,
                                      BasisOrdering ordering = BasisOrdering::repeller_first) {
    sort_basis_orbits(orbits, ordering);
    const Matrix u_adj = u_open.adjoint();

    SemiclassicalBasis basis;
    for (const auto& g : orbits) {
        for (int m = 0; m < g.orbit.period(); ++m) {
            ScarFunction sf = scar_pair(g, m, u_open, u_adj, tau, conv);
            if (!sf.usable) {
                ++basis.excluded;
                continue;
            }
            basis.scars.push_back(std::move(sf));
        }
    }
    if (basis.scars.empty()) throw numerical_error("scar basis is empty");

    const int n = static_cast<int>(u_open.rows());
    const int b = basis.size();
    basis.right_states.resize(n, b);
    basis.left_states.resize(n, b);
    for (int j = 0; j < b; ++j) {
        basis.right_states.col(j) = basis.scars[j].right;
        basis.left_states.col(j) = basis.scars[j].left;
    }
    const Matrix propagated = u_open * basis.right_states;
    basis.interaction = basis.left_states.adjoint() * propagated;
    basis.overlap = basis.left_states.adjoint() * basis.right_states;
    return basis;
}

// Solution of the generalized eigenvalue problem A c = z S c in an
// SVD-regularized subspace of the overlap matrix.
struct GeneralizedSolution {
    std::vector<cplx> eigenvalues;  // sorted |z| descending
    Matrix coeff_right;             // basis_size x rank, right coefficient vectors
    Matrix coeff_left;              // basis_size x rank, left coefficient vectors
    std::vector<char> defective;
    int rank = 0;
};

// S = U Sigma V^H; directions with sigma below sigma_cut * sigma_max are
// discarded and the problem Sigma^{-1} U^H A V y = z y is solved in the
// retained subspace.
inline GeneralizedSolution solve_generalized(const Matrix& a, const Matrix& s, double sigma_cut,
                                             bool with_vectors = true) {
    if (a.rows() != a.cols() || s.rows() != s.cols() || a.rows() != s.rows())
        throw config_error("solve_generalized needs square matrices of equal size");
    if (!(sigma_cut >= 0.0)) throw config_error("sigma_cut must be nonnegative");

    Eigen::BDCSVD<Matrix> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sig = svd.singularValues();
    const double smax = sig.size() > 0 ? sig(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < sig.size(); ++i)
        if (sig(i) >= sigma_cut * smax && sig(i) > 0.0) ++rank;
    if (rank == 0) throw numerical_error("overlap matrix is degenerate below the cutoff");

    const Matrix uk = svd.matrixU().leftCols(rank);
    const Matrix vk = svd.matrixV().leftCols(rank);
    Matrix reduced = uk.adjoint() * a * vk;
    for (int i = 0; i < rank; ++i) reduced.row(i) /= sig(i);

    GeneralizedSolution sol;
    sol.rank = rank;
    if (!with_vectors) {
        Eigen::ComplexEigenSolver<Matrix> es(reduced, false);
        if (es.info() != Eigen::Success) throw numerical_error("reduced eigensolver failed");
        sol.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + rank);
        std::sort(sol.eigenvalues.begin(), sol.eigenvalues.end(), detail::spectral_order);
        sol.defective.assign(rank, 0);
        return sol;
    }

    const ResonanceSet red = eigendecompose(reduced, true);
    sol.eigenvalues = red.eigenvalues;
    sol.defective = red.defective;
    sol.coeff_right = vk * red.right;
    Matrix lw = red.left;
    for (int i = 0; i < rank; ++i) lw.row(i) /= sig(i);
    sol.coeff_left = uk * lw;
    return sol;
}

// Hilbert-space semiclassical eigenstates: coefficient-weighted sums of
// the scar functions of the (possibly prefix-truncated) basis.
inline std::pair<Matrix, Matrix> semiclassical_states(const SemiclassicalBasis& basis,
                                                      const GeneralizedSolution& sol,
                                                      int prefix = -1) {
    const int b = prefix < 0 ? basis.size() : prefix;
    if (sol.coeff_right.rows() != b) throw config_error("solution does not match basis prefix");
    return {basis.right_states.leftCols(b) * sol.coeff_right,
            basis.left_states.leftCols(b) * sol.coeff_left};
}

struct PerformanceReport {
    bool defined = false;
    double p = 0.0;
    int matched = 0;
    int exact_longlived = 0;
    double nu_c = 0.0;
    double epsilon = 0.0;
    std::vector<std::pair<cplx, cplx>> pairs;  // (exact, semiclassical)
};

// Fraction of long-lived exact resonances reproduced within epsilon:
// exact eigenvalues above nu_c, in descending modulus, each greedily
// matched to the nearest still-unmatched semiclassical eigenvalue.
inline PerformanceReport performance(const std::vector<cplx>& exact, const std::vector<cplx>& semi,
                                     double nu_c, double epsilon) {
    if (!(epsilon > 0.0)) throw config_error("matching radius epsilon must be positive");
    PerformanceReport rep;
    rep.nu_c = nu_c;
    rep.epsilon = epsilon;

    std::vector<cplx> longlived;
    for (const cplx& z : exact)
        if (std::abs(z) > nu_c + modulus_snap_tol) longlived.push_back(z);
    std::sort(longlived.begin(), longlived.end(), detail::spectral_order);
    rep.exact_longlived = static_cast<int>(longlived.size());
    if (longlived.empty()) return rep;

    rep.defined = true;
    std::vector<char> used(semi.size(), 0);
    for (const cplx& ze : longlived) {
        int best = -1;
        double best_d = 0.0;
        for (std::size_t k = 0; k < semi.size(); ++k) {
            if (used[k]) continue;
            const double d = std::abs(semi[k] - ze);
            if (best < 0 || d < best_d) {
                best = static_cast<int>(k);
                best_d = d;
            }
        }
        if (best >= 0 && best_d <= epsilon) {
            used[best] = 1;
            ++rep.matched;
            rep.pairs.emplace_back(ze, semi[best]);
        }
    }
    rep.p = static_cast<double>(rep.matched) / rep.exact_longlived;
    return rep;
}

struct PrefixSearchResult {
    int n_sf = 0;
    double p_reached = 0.0;
    bool reached = false;
};

// Smallest basis prefix whose generalized solution reaches the target
// performance. Prefixes shorter than target * M cannot supply enough
// matches, so the scan starts there.
inline PrefixSearchResult smallest_prefix_for_target(const SemiclassicalBasis& basis,
                                                     const std::vector<cplx>& exact, double nu_c,
                                                     double epsilon, double target,
                                                     double sigma_cut) {
    const int b = basis.size();
    const int m_exact = count_longlived(exact, nu_c);
    PrefixSearchResult res;
    if (m_exact == 0) {
        res.reached = false;
        res.n_sf = b;
        return res;
    }
    int k0 = static_cast<int>(std::ceil(target * m_exact - 1e-9));
    k0 = std::max(k0, 1);
    for (int k = k0; k <= b; ++k) {
        const GeneralizedSolution sol = solve_generalized(
            basis.interaction.topLeftCorner(k, k), basis.overlap.topLeftCorner(k, k), sigma_cut,
            false);
        const PerformanceReport rep = performance(exact, sol.eigenvalues, nu_c, epsilon);
        if (rep.defined && rep.p >= target - 1e-12) {
            res.n_sf = k;
            res.p_reached = rep.p;
            res.reached = true;
            return res;
        }
        if (k == b) res.p_reached = rep.p;
    }
    res.n_sf = b;
    res.reached = false;
    return res;
}

}  // namespace tribaker
