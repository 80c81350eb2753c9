#pragma once

#include <cmath>

#include "tribaker/common.hpp"

namespace tribaker {

struct PhasePoint {
    double q = 0.0;  // position in [0,1)
    double p = 0.0;  // momentum in [0,1)
};

inline int ternary_branch(double x) {
    int e = static_cast<int>(std::floor(3.0 * x));
    if (e < 0) e = 0;
    if (e > 2) e = 2;
    return e;
}

// One step of the tribaker map: (q,p) -> (3q - e, (p + e)/3), e = floor(3q).
inline PhasePoint tribaker_forward(PhasePoint x) {
    const int e = ternary_branch(x.q);
    double q = 3.0 * x.q - e;
    double p = (x.p + e) / 3.0;
    if (q >= 1.0) q -= 1.0;
    if (q < 0.0) q += 1.0;
    return {q, p};
}

// Inverse step; the branch is read off the momentum: e = floor(3p).
inline PhasePoint tribaker_backward(PhasePoint x) {
    const int e = ternary_branch(x.p);
    double p = 3.0 * x.p - e;
    double q = (x.q + e) / 3.0;
    if (p >= 1.0) p -= 1.0;
    if (p < 0.0) p += 1.0;
    return {q, p};
}

}  // namespace tribaker
