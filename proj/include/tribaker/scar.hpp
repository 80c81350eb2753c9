#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "tribaker/common.hpp"
#include "tribaker/orbits.hpp"
#include "tribaker/quantum.hpp"

namespace tribaker {

// Coherent state on the torus with antiperiodic boundary phases: a
// periodized Gaussian, winding sum truncated at |nu| <= 3 (the tails are
// below 1e-12 already for N >= 27).
inline Vector coherent_state(int n, double q0, double p0) {
    if (n < 1) throw config_error("coherent_state needs N >= 1");
    if (!(q0 >= 0.0 && q0 < 1.0) || !(p0 >= 0.0 && p0 < 1.0))
        throw config_error("coherent_state center must lie in [0,1)x[0,1)");
    Vector v(n);
    for (int j = 0; j < n; ++j) {
        const double qj = position_grid(j, n);
        cplx amp = 0.0;
        for (int nu = -3; nu <= 3; ++nu) {
            const double dq = qj + nu - q0;
            const double mag = std::exp(-M_PI * n * dq * dq);
            const double phase = two_pi * n * p0 * dq;
            const double sign = (nu & 1) ? -1.0 : 1.0;
            amp += sign * mag * cplx(std::cos(phase), std::sin(phase));
        }
        v(j) = amp;
    }
    v.normalize();
    return v;
}

enum class ThetaConvention {
    exclusive,  // theta_j accumulates the action of steps 0..j-1
    inclusive,  // literal reading: steps 0..j
};

inline double quasienergy(const OrbitGeometry& g, int m, int n) {
    return (n * g.total_action + m) / static_cast<double>(g.orbit.period());
}

// Periodic-orbit mode: the phase-locked combination of the orbit's
// coherent states, phi_m = sum_j exp(-2 pi i (j A_m - N theta_j)) |q_j,p_j>.
inline Vector po_mode(const OrbitGeometry& g, int m, int n,
                      ThetaConvention conv = ThetaConvention::exclusive) {
    const int L = g.orbit.period();
    if (m < 0 || m >= L) throw config_error("po_mode index m must lie in [0, L)");
    const double a_m = quasienergy(g, m, n);

    Vector phi = Vector::Zero(n);
    double theta = (conv == ThetaConvention::inclusive) ? g.step_actions[0] : 0.0;
    for (int j = 0; j < L; ++j) {
        const double phase = -two_pi * (j * a_m - n * theta);
        phi += cplx(std::cos(phase), std::sin(phase)) * coherent_state(n, g.points[j].q, g.points[j].p);
        if (j + 1 < L)
            theta += (conv == ThetaConvention::inclusive) ? g.step_actions[j + 1] : g.step_actions[j];
    }
    const double nrm = phi.norm();
    if (nrm == 0.0) throw numerical_error("po_mode collapsed to zero");
    return phi / nrm;
}

// Right/left scar pair built on one (orbit, m) channel.
struct ScarFunction {
    SymbolicOrbit orbit;
    int m = 0;
    double quasienergy = 0.0;
    int tau = 0;
    bool from_repeller = true;
    bool usable = true;
    Vector right;
    Vector left;
};

// Default propagation horizon: the Ehrenfest time ln N / lambda with
// lambda = ln 3.
inline int ehrenfest_tau(int n) {
    return static_cast<int>(std::llround(std::log(static_cast<double>(n)) / std::log(3.0)));
}

// Short-time cosine-windowed propagation of the orbit mode under the open
// map (adjoint propagation for the left function), then the
// normalization <l|r> = 1 with |r| = |l|. Pairs with a vanishing
// left-right overlap are flagged unusable.
inline ScarFunction scar_pair(const OrbitGeometry& g, int m, const Matrix& u_open,
                              const Matrix& u_open_adj, int tau,
                              ThetaConvention conv = ThetaConvention::exclusive,
                              const Vector* mode_override = nullptr) {
    if (tau < 1) throw config_error("scar propagation horizon tau must be >= 1");
    const int n = static_cast<int>(u_open.rows());
    const double a_m = quasienergy(g, m, n);
    const Vector phi = mode_override ? *mode_override : po_mode(g, m, n, conv);

    Vector right = Vector::Zero(n), left = Vector::Zero(n);
    Vector fwd = phi, bwd = phi;
    for (int t = 0; t <= tau; ++t) {
        const double window = std::cos(M_PI * t / (2.0 * tau));
        const double ang = two_pi * a_m * t;
        right += window * cplx(std::cos(ang), -std::sin(ang)) * fwd;
        left += window * cplx(std::cos(ang), std::sin(ang)) * bwd;
        if (t < tau) {
            fwd = u_open * fwd;
            bwd = u_open_adj * bwd;
        }
    }

    ScarFunction sf;
    sf.orbit = g.orbit;
    sf.m = m;
    sf.quasienergy = a_m;
    sf.tau = tau;
    sf.from_repeller = g.in_repeller;

    const double nr = right.norm(), nl = left.norm();
    if (nr == 0.0 || nl == 0.0) {
        sf.usable = false;
        sf.right = right;
        sf.left = left;
        return sf;
    }
    right /= nr;
    left /= nl;
    const cplx c = left.dot(right);
    if (std::abs(c) < 1e-10) {
        sf.usable = false;
        sf.right = right;
        sf.left = left;
        return sf;
    }
    const cplx sq = std::sqrt(c);
    sf.right = right / sq;
    sf.left = left / std::conj(sq);
    return sf;
}

}  // namespace tribaker
