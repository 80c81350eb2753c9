#pragma once

#include <cmath>
#include <string>

#include "tribaker/common.hpp"

namespace tribaker {

// The opening is the strip 1/3 < q < 2/3, parallel to the p axis.
inline constexpr double opening_lo = 1.0 / 3.0;
inline constexpr double opening_hi = 2.0 / 3.0;

inline bool in_opening(double q) { return q > opening_lo && q < opening_hi; }

enum class ReflectivityShape { step, sinusoidal, constant, complete };

inline std::string to_string(ReflectivityShape s) {
    switch (s) {
        case ReflectivityShape::step: return "step";
        case ReflectivityShape::sinusoidal: return "sinusoidal";
        case ReflectivityShape::constant: return "constant";
        case ReflectivityShape::complete: return "complete";
    }
    return "?";
}

inline ReflectivityShape reflectivity_shape_from_string(const std::string& s) {
    if (s == "step") return ReflectivityShape::step;
    if (s == "sinusoidal") return ReflectivityShape::sinusoidal;
    if (s == "constant") return ReflectivityShape::constant;
    if (s == "complete") return ReflectivityShape::complete;
    throw config_error("unknown reflectivity shape: " + s);
}

// Reflectivity function F_R(q) on the torus. Outside the opening every
// profile reflects fully (F = 1); the shape formulas apply only inside.
// The step shape is a Fermi-Dirac flank mirrored about q = 1/2; the
// sinusoidal shape dips smoothly from 1 at the opening boundaries to R at
// the center; "complete" is the fully open reference case (F = 0 inside).
struct ReflectivityProfile {
    ReflectivityShape shape = ReflectivityShape::step;
    double r = 0.0;       // floor of the reflectivity, in [0,1]
    double a = 120.0;     // step steepness
    double b = 0.63;      // step flank position, in (1/2, 1)

    void validate() const {
        if (!(r >= 0.0 && r <= 1.0)) throw config_error("reflectivity R must lie in [0,1]");
        if (shape == ReflectivityShape::step) {
            if (!(a > 0.0)) throw config_error("step steepness A must be positive");
            if (!(b > 0.5 && b < 1.0)) throw config_error("step offset B must lie in (1/2,1)");
        }
    }

    double evaluate(double q) const {
        if (!(q >= 0.0 && q < 1.0)) throw config_error("reflectivity argument q must lie in [0,1)");
        validate();
        if (!in_opening(q)) return 1.0;
        switch (shape) {
            case ReflectivityShape::step: {
                // mirrored Fermi-Dirac flank; branches agree at q = 1/2
                const double x = (q > 0.5) ? q : 1.0 - q;
                return (1.0 - r) / (1.0 + std::exp(-a * (x - b))) + r;
            }
            case ReflectivityShape::sinusoidal:
                return ((1.0 - r) * std::cos(3.0 * two_pi * q) + (1.0 + r)) / 2.0;
            case ReflectivityShape::constant:
                return r;
            case ReflectivityShape::complete:
                return 0.0;
        }
        return 1.0;
    }

    bool operator==(const ReflectivityProfile&) const = default;
};

}  // namespace tribaker
