#pragma once

#include <Eigen/Dense>
#include <string>

#include "tribaker/common.hpp"
#include "tribaker/reflectivity.hpp"

namespace tribaker {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// N x N complex operator plus the label used when persisting it.
struct OperatorMatrix {
    std::string label;
    Matrix mat;

    int dim() const { return static_cast<int>(mat.rows()); }
};

// Position grid point q_j = (j + chi)/N.
inline double position_grid(int j, int n, double chi = 0.5) {
    return (j + chi) / static_cast<double>(n);
}

// Discrete Fourier kernel <p_k|q_j> = exp(-2 pi i (j+chi_q)(k+chi_p)/N)/sqrt(N),
// row index k, column index j. Antiperiodic boundary conditions are
// chi_q = chi_p = 1/2.
inline Matrix dft_matrix(int n, double chi_q = 0.5, double chi_p = 0.5) {
    if (n < 1) throw config_error("dft_matrix needs N >= 1");
    Matrix g(n, n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            // product grouped first so equal boundary phases give a
            // bitwise-symmetric kernel
            const double phase = -two_pi * (((j + chi_q) * (k + chi_p)) / n);
            g(k, j) = norm * cplx(std::cos(phase), std::sin(phase));
        }
    }
    return g;
}

namespace detail {

inline void require_divisible_by_three(int n, const char* what) {
    if (n < 3 || n % 3 != 0)
        throw config_error(std::string(what) + " needs a Hilbert dimension divisible by 3");
}

// Block-diagonal G_{N/3} (three copies, same boundary phases).
inline Matrix dft_block(int n) {
    const int n3 = n / 3;
    const Matrix g3 = dft_matrix(n3);
    Matrix blk = Matrix::Zero(n, n);
    for (int b = 0; b < 3; ++b) blk.block(b * n3, b * n3, n3, n3) = g3;
    return blk;
}

}  // namespace detail

// Closed tribaker propagator U = G_N^{-1} G_{N/3}; G is unitary so the
// inverse is taken as the adjoint.
inline Matrix closed_baker(int n) {
    detail::require_divisible_by_three(n, "closed_baker");
    return dft_matrix(n).adjoint() * detail::dft_block(n);
}

// Diagonal of the opening operator: sqrt(F(q_j)) with q_j = (j+1/2)/N.
// Outside the opening F = 1, so only the middle third is attenuated.
inline Eigen::VectorXd opening_diagonal(int n, const ReflectivityProfile& profile) {
    detail::require_divisible_by_three(n, "opening_operator");
    profile.validate();
    Eigen::VectorXd d(n);
    for (int j = 0; j < n; ++j) d(j) = std::sqrt(profile.evaluate(position_grid(j, n)));
    return d;
}

inline Matrix opening_operator(int n, const ReflectivityProfile& profile) {
    return opening_diagonal(n, profile).cast<cplx>().asDiagonal();
}

// Continuously open propagator U~ = G_N^{-1} P G_{N/3} P.
inline Matrix open_baker(int n, const ReflectivityProfile& profile) {
    detail::require_divisible_by_three(n, "open_baker");
    const Eigen::VectorXd d = opening_diagonal(n, profile);
    Matrix m = detail::dft_block(n);
    for (int j = 0; j < n; ++j) m.col(j) *= d(j);
    for (int k = 0; k < n; ++k) m.row(k) *= d(k);
    return dft_matrix(n).adjoint() * m;
}

// Parity (psi)_j -> (psi)_{N-1-j}; an involution that commutes with the
// antiperiodic baker and with every mirror-symmetric opening.
inline Matrix parity_operator(int n) {
    if (n < 1) throw config_error("parity_operator needs N >= 1");
    Matrix pi = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) pi(j, n - 1 - j) = 1.0;
    return pi;
}

}  // namespace tribaker
