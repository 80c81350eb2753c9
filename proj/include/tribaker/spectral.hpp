#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "tribaker/common.hpp"
#include "tribaker/quantum.hpp"

namespace tribaker {

inline constexpr double eigen_pairing_tol = 1e-8;
inline constexpr double modulus_snap_tol = 1e-8;
inline constexpr int max_eigen_dim = 2187;  // 3^7 resource guard

// Full left/right eigensystem of a (generally non-normal) operator.
// Eigenvalues are sorted by (|z| descending, phase ascending); column j of
// `right`/`left` belongs to eigenvalues[j]. After pairing, usable pairs
// satisfy <l_j|r_j> = 1 and |r_j| = |l_j|; pairs the decomposition could
// not biorthogonalize are marked defective and excluded downstream.
struct ResonanceSet {
    int n = 0;
    std::vector<cplx> eigenvalues;
    Matrix right;  // n x n, or 0 x 0 when computed without vectors
    Matrix left;
    std::vector<char> defective;
    int defective_count = 0;
    double max_residual = 0.0;

    bool has_vectors() const { return right.size() > 0; }
};

namespace detail {

inline bool spectral_order(const cplx& a, const cplx& b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    return std::arg(a) < std::arg(b);
}

// Balance the norms of a biorthogonal pair without touching <l|r>.
inline void balance_pair(Vector& r, Vector& l) {
    const double nr = r.norm(), nl = l.norm();
    if (nr == 0.0 || nl == 0.0) return;
    const double f = std::sqrt(nl / nr);
    r *= f;
    l /= f;
}

}  // namespace detail

// Dense eigendecomposition with left and right vectors. Right vectors come
// from the decomposition of M, left ones from the decomposition of the
// adjoint (a left eigenvector of M is a right eigenvector of M^H with the
// conjugate eigenvalue); the two spectra are matched greedily within the
// pairing tolerance. Clusters of (near-)degenerate eigenvalues are
// re-biorthogonalized through their cross-Gram matrix.
inline ResonanceSet eigendecompose(const Matrix& m, bool with_vectors = true) {
    if (m.rows() != m.cols()) throw config_error("eigendecompose needs a square matrix");
    const int n = static_cast<int>(m.rows());
    if (n < 1) throw config_error("eigendecompose needs N >= 1");
    if (n > max_eigen_dim) throw resource_error("eigendecompose: dimension exceeds 3^7 guard");

    ResonanceSet set;
    set.n = n;

    Eigen::ComplexEigenSolver<Matrix> es(m, with_vectors);
    if (es.info() != Eigen::Success) throw numerical_error("eigensolver failed to converge");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        return detail::spectral_order(es.eigenvalues()(i), es.eigenvalues()(j));
    });

    set.eigenvalues.resize(n);
    for (int j = 0; j < n; ++j) set.eigenvalues[j] = es.eigenvalues()(order[j]);
    set.defective.assign(n, 0);

    if (!with_vectors) return set;

    set.right.resize(n, n);
    for (int j = 0; j < n; ++j) set.right.col(j) = es.eigenvectors().col(order[j]).normalized();

    Eigen::ComplexEigenSolver<Matrix> esl(m.adjoint(), true);
    if (esl.info() != Eigen::Success) throw numerical_error("adjoint eigensolver failed to converge");

    // Greedy proximity pairing of conj(mu_k) against the sorted spectrum.
    set.left.resize(n, n);
    std::vector<char> used(n, 0);
    for (int j = 0; j < n; ++j) {
        int best = -1;
        double best_d = 0.0;
        for (int k = 0; k < n; ++k) {
            if (used[k]) continue;
            const double d = std::abs(std::conj(esl.eigenvalues()(k)) - set.eigenvalues[j]);
            if (best < 0 || d < best_d) {
                best = k;
                best_d = d;
            }
        }
        used[best] = 1;
        set.left.col(j) = esl.eigenvectors().col(best).normalized();
        if (best_d > eigen_pairing_tol) set.defective[j] = 1;
    }

    // Cluster eigenvalues that sit within the pairing tolerance of each
    // other; inside a cluster the raw left/right pairing is arbitrary, so
    // biorthogonality is restored with the cluster Gram matrix.
    std::vector<int> cluster(n, -1);
    int n_clusters = 0;
    for (int j = 0; j < n; ++j) {
        if (cluster[j] >= 0) continue;
        cluster[j] = n_clusters;
        for (int k = j + 1; k < n; ++k) {
            if (cluster[k] >= 0) continue;
            if (std::abs(set.eigenvalues[j] - set.eigenvalues[k]) <= eigen_pairing_tol)
                cluster[k] = n_clusters;
        }
        ++n_clusters;
    }
    for (int c = 0; c < n_clusters; ++c) {
        std::vector<int> members;
        for (int j = 0; j < n; ++j)
            if (cluster[j] == c) members.push_back(j);
        if (members.size() < 2) continue;
        const int s = static_cast<int>(members.size());
        Matrix rc(n, s), lc(n, s);
        for (int i = 0; i < s; ++i) {
            rc.col(i) = set.right.col(members[i]);
            lc.col(i) = set.left.col(members[i]);
        }
        Matrix gram = lc.adjoint() * rc;
        Eigen::JacobiSVD<Matrix> svd(gram);
        const double smin = svd.singularValues().minCoeff();
        const double smax = svd.singularValues().maxCoeff();
        if (smax <= 0.0 || smin < 1e-10 * smax) {
            for (int j : members) set.defective[j] = 1;
            continue;
        }
        // L' = L G^{-H} makes L'^H R the identity on the cluster
        Matrix lfix = lc * gram.adjoint().inverse();
        for (int i = 0; i < s; ++i) set.left.col(members[i]) = lfix.col(i);
    }

    // Residuals at unit norm, then the working normalization:
    // <l|r> = 1 with matched norms.
    for (int j = 0; j < n; ++j) {
        Vector r = set.right.col(j).normalized();
        Vector l = set.left.col(j).normalized();
        const cplx z = set.eigenvalues[j];
        const double res_r = (m * r - z * r).norm();
        const double res_l = (m.adjoint() * l - std::conj(z) * l).norm();
        set.max_residual = std::max({set.max_residual, res_r, res_l});

        const cplx c = set.left.col(j).dot(set.right.col(j));  // <l|r>
        if (std::abs(c) < 1e-10) {
            set.defective[j] = 1;
            continue;
        }
        const cplx sq = std::sqrt(c);
        Vector rn = set.right.col(j) / sq;
        Vector ln = set.left.col(j) / std::conj(sq);
        detail::balance_pair(rn, ln);
        set.right.col(j) = rn;
        set.left.col(j) = ln;
    }
    set.defective_count = 0;
    for (char d : set.defective) set.defective_count += d;
    return set;
}

// Number of long-lived resonances: strict |z| > nu_c, with moduli within
// modulus_snap_tol of nu_c treated as sitting exactly at the threshold
// (and therefore not counted), so counts are stable under round-off.
inline int count_longlived(const std::vector<cplx>& eigenvalues, double nu_c) {
    if (!(nu_c >= 0.0 && nu_c <= 1.0)) throw config_error("nu_c must lie in [0,1]");
    int count = 0;
    for (const cplx& z : eigenvalues)
        if (std::abs(z) > nu_c + modulus_snap_tol) ++count;
    return count;
}

inline int count_longlived(const ResonanceSet& set, double nu_c) {
    return count_longlived(set.eigenvalues, nu_c);
}

// Local dimension d_loc = [ln M(N) - ln M(N/3)] / ln 3; undefined when a
// count vanishes.
inline std::optional<double> local_dimension(int count_n, int count_n3) {
    if (count_n < 0 || count_n3 < 0) throw config_error("resonance counts cannot be negative");
    if (count_n == 0 || count_n3 == 0) return std::nullopt;
    return (std::log(static_cast<double>(count_n)) - std::log(static_cast<double>(count_n3))) /
           std::log(3.0);
}

}  // namespace tribaker
