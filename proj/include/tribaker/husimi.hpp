#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "tribaker/common.hpp"
#include "tribaker/scar.hpp"
#include "tribaker/spectral.hpp"

namespace tribaker {

// Husimi values sampled at the K x K lattice of coherent-state centers
// ((a+1/2)/K, (b+1/2)/K); same storage convention as MeasureGrid (row =
// q index).
struct HusimiGrid {
    int k = 0;
    std::string source;  // "exact" | "semiclassical" | ...
    double nu_c = -1.0;  // threshold used for accumulated grids, -1 otherwise
    std::vector<double> values;

    double& at(int a, int b) { return values[static_cast<std::size_t>(a) * k + b]; }
    double at(int a, int b) const { return values[static_cast<std::size_t>(a) * k + b]; }
};

// Husimi kernel of one resonance projector at a single analyzer state:
// |<cs|r><l|cs>| / |<l|r>|.
inline double husimi_point(const Vector& right, const Vector& left, const Vector& analyzer) {
    const cplx lr = left.dot(right);
    if (std::abs(lr) < 1e-10) throw numerical_error("husimi_point: defective left/right pair");
    return std::abs(analyzer.dot(right) * left.dot(analyzer)) / std::abs(lr);
}

namespace detail {

// Rows of <q,p| for a block of grid centers, evaluated as one dense
// matrix so grid construction is a GEMM.
inline Matrix analyzer_block(int n, int k, int row_begin, int rows) {
    Matrix block(rows * k, n);
    for (int a = 0; a < rows; ++a) {
        const double q0 = (row_begin + a + 0.5) / k;
        for (int b = 0; b < k; ++b) {
            const double p0 = (b + 0.5) / k;
            block.row(static_cast<std::size_t>(a) * k + b) = coherent_state(n, q0, p0).adjoint();
        }
    }
    return block;
}

}  // namespace detail

// Accumulated projector sum Q(q,p) = |<q,p| sum_j h_j |q,p>| over the
// given resonance columns (complex accumulation, modulus at the end).
// `weights` carries 1/<l_j|r_j>; pass unit weights for pairs already in
// the unit-overlap normalization.
inline HusimiGrid husimi_accumulate(const Matrix& rights, const Matrix& lefts,
                                    const std::vector<cplx>& weights, int k,
                                    const std::string& source, double nu_c = -1.0) {
    const int n = static_cast<int>(rights.rows());
    const int m = static_cast<int>(rights.cols());
    if (lefts.rows() != n || lefts.cols() != m) throw config_error("husimi_accumulate: shape mismatch");
    if (static_cast<int>(weights.size()) != m) throw config_error("husimi_accumulate: weights mismatch");
    if (k < 1) throw config_error("husimi_accumulate: K must be >= 1");
    if (m == 0) throw numerical_error("husimi_accumulate: empty projector set");

    HusimiGrid grid;
    grid.k = k;
    grid.source = source;
    grid.nu_c = nu_c;
    grid.values.assign(static_cast<std::size_t>(k) * k, 0.0);

    const int block_rows = std::max(1, 4096 / k);
    for (int row = 0; row < k; row += block_rows) {
        const int rows = std::min(block_rows, k - row);
        const Matrix bras = detail::analyzer_block(n, k, row, rows);
        const Matrix alpha = bras * rights;            // <qp|r_j>
        const Matrix beta = (bras * lefts).conjugate();  // <l_j|qp>
        for (int i = 0; i < rows * k; ++i) {
            cplx acc = 0.0;
            for (int j = 0; j < m; ++j) acc += alpha(i, j) * beta(i, j) * weights[j];
            grid.values[static_cast<std::size_t>(row) * k + i] = std::abs(acc);
        }
    }
    return grid;
}

// Phase-space density of a single resonance projector h_j.
inline HusimiGrid projector_husimi(const Vector& right, const Vector& left, int k,
                                   const std::string& source = "exact") {
    const cplx lr = left.dot(right);
    if (std::abs(lr) < 1e-10) throw numerical_error("projector_husimi: defective left/right pair");
    Matrix r(right.size(), 1), l(left.size(), 1);
    r.col(0) = right;
    l.col(0) = left;
    return husimi_accumulate(r, l, {1.0 / lr}, k, source);
}

// Quantum continuous repeller: projectors of all resonances above nu_c,
// in descending modulus.
inline HusimiGrid accumulate_q(const ResonanceSet& set, double nu_c, int k,
                               const std::string& source = "exact") {
    if (!set.has_vectors()) throw config_error("accumulate_q needs eigenvectors");
    std::vector<int> cols;
    for (int j = 0; j < set.n; ++j) {
        if (set.defective[j]) continue;
        if (std::abs(set.eigenvalues[j]) > nu_c + modulus_snap_tol) cols.push_back(j);
    }
    if (cols.empty()) throw numerical_error("accumulate_q: no long-lived resonances above nu_c");

    Matrix rights(set.right.rows(), cols.size()), lefts(set.left.rows(), cols.size());
    std::vector<cplx> weights(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
        rights.col(i) = set.right.col(cols[i]);
        lefts.col(i) = set.left.col(cols[i]);
        weights[i] = 1.0 / set.left.col(cols[i]).dot(set.right.col(cols[i]));
    }
    return husimi_accumulate(rights, lefts, weights, k, source, nu_c);
}

// Overlap of two normalized distributions, implemented as cosine
// similarity so O(Q,Q) = 1 and grid-area factors drop out. The unit-sum
// variant of the integral is provided for comparison.
inline std::optional<double> overlap_o(const HusimiGrid& qa, const HusimiGrid& qb,
                                       bool unit_sum_normalization = false) {
    if (qa.k != qb.k) throw config_error("overlap_o: resolution mismatch");
    double na = 0, nb = 0;
    for (double v : qa.values) na += unit_sum_normalization ? v : v * v;
    for (double v : qb.values) nb += unit_sum_normalization ? v : v * v;
    if (na <= 0.0 || nb <= 0.0) return std::nullopt;
    if (!unit_sum_normalization) {
        return cosine_similarity(qa.values, qb.values);
    }
    double acc = 0.0;
    const double cell = 1.0 / (static_cast<double>(qa.k) * qa.k);
    for (std::size_t i = 0; i < qa.values.size(); ++i)
        acc += (qa.values[i] / na) * (qb.values[i] / nb) / cell;
    return acc;
}

}  // namespace tribaker
