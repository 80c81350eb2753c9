#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tribaker/common.hpp"
#include "tribaker/map.hpp"
#include "tribaker/reflectivity.hpp"
#include "tribaker/rng.hpp"

namespace tribaker {

enum class EvolveDirection { forward, backward, intersection };

inline std::string to_string(EvolveDirection d) {
    switch (d) {
        case EvolveDirection::forward: return "forward";
        case EvolveDirection::backward: return "backward";
        case EvolveDirection::intersection: return "intersection";
    }
    return "?";
}

inline EvolveDirection direction_from_string(const std::string& s) {
    if (s == "forward") return EvolveDirection::forward;
    if (s == "backward") return EvolveDirection::backward;
    if (s == "intersection") return EvolveDirection::intersection;
    throw config_error("unknown direction: " + s);
}

// Finite-time intensity measure on a K x K partition of the torus.
// Cell (a,b) covers [a/K,(a+1)/K) x [b/K,(b+1)/K); storage is row-major
// with the q index as row. Values are normalized to unit total mass
// unless the whole grid died (zero_flag).
struct MeasureGrid {
    int k = 0;
    int t = 0;
    EvolveDirection direction = EvolveDirection::forward;
    std::uint64_t seed = 0;
    int n_ic = 0;
    bool zero_flag = false;
    std::vector<double> values;  // k*k entries

    double& at(int a, int b) { return values[static_cast<std::size_t>(a) * k + b]; }
    double at(int a, int b) const { return values[static_cast<std::size_t>(a) * k + b]; }

    double total() const {
        double s = 0;
        for (double v : values) s += v;
        return s;
    }

    MeasureGrid transposed() const {
        MeasureGrid g = *this;
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) g.at(a, b) = at(b, a);
        return g;
    }
};

namespace detail {

// Evolve one trajectory t steps, attenuating by F(q) whenever the
// pre-step point sits in the opening (mirrors the quantum P U P order).
inline double evolve_intensity(PhasePoint x, const ReflectivityProfile& profile, int t,
                               bool forward) {
    double intensity = 1.0;
    for (int step = 0; step < t; ++step) {
        if (in_opening(x.q)) {
            intensity *= profile.evaluate(x.q);
            if (intensity == 0.0) return 0.0;
        }
        x = forward ? tribaker_forward(x) : tribaker_backward(x);
    }
    return intensity;
}

}  // namespace detail

// Monte Carlo finite-time measure: N_ic uniform samples per cell, each
// carrying unit initial intensity. Per-cell RNG streams keep the result
// independent of evaluation order.
inline MeasureGrid compute_measure(const ReflectivityProfile& profile, EvolveDirection direction,
                                   int t, int k, int n_ic, std::uint64_t seed) {
    profile.validate();
    if (direction == EvolveDirection::intersection)
        throw config_error("compute_measure evolves forward or backward; use continuous_repeller");
    if (t < 0) throw config_error("time t must be >= 0");
    if (k < 3) throw config_error("grid resolution K must be >= 3");
    if (n_ic < 1) throw config_error("N_ic must be >= 1");

    const bool fwd = direction == EvolveDirection::forward;
    MeasureGrid grid;
    grid.k = k;
    grid.t = t;
    grid.direction = direction;
    grid.seed = seed;
    grid.n_ic = n_ic;
    grid.values.assign(static_cast<std::size_t>(k) * k, 0.0);

    const std::uint64_t dir_salt = fwd ? 0x66u : 0x62u;
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            const std::uint64_t cell = static_cast<std::uint64_t>(a) * k + b;
            SplitMix64 rng = derived_stream(seed, cell * 2 + dir_salt);
            double acc = 0.0;
            for (int i = 0; i < n_ic; ++i) {
                PhasePoint x{(a + rng.next_double()) / k, (b + rng.next_double()) / k};
                acc += detail::evolve_intensity(x, profile, t, fwd);
            }
            grid.at(a, b) = acc / n_ic;
        }
    }

    const double total = grid.total();
    if (total <= 0.0) {
        grid.zero_flag = true;
        std::fill(grid.values.begin(), grid.values.end(), 0.0);
        return grid;
    }
    for (double& v : grid.values) v /= total;
    return grid;
}

// Cellwise product of the two normalized measures, renormalized: the
// finite-measure analogue of intersecting the trapped sets.
inline MeasureGrid continuous_repeller(const MeasureGrid& fwd, const MeasureGrid& bwd) {
    if (fwd.k != bwd.k) throw config_error("continuous_repeller: resolution mismatch");
    if (fwd.t != bwd.t) throw config_error("continuous_repeller: time mismatch");

    MeasureGrid grid = fwd;
    grid.direction = EvolveDirection::intersection;
    grid.zero_flag = fwd.zero_flag || bwd.zero_flag;
    for (std::size_t i = 0; i < grid.values.size(); ++i) grid.values[i] = fwd.values[i] * bwd.values[i];

    const double total = grid.total();
    if (total <= 0.0) {
        grid.zero_flag = true;
        std::fill(grid.values.begin(), grid.values.end(), 0.0);
        return grid;
    }
    for (double& v : grid.values) v /= total;
    return grid;
}

// Mean surviving intensity of a uniform ensemble after t steps,
// unnormalized. For the complete opening this decays like (2/3)^t.
inline double mean_survival_intensity(const ReflectivityProfile& profile, int t,
                                      std::int64_t n_points, std::uint64_t seed) {
    profile.validate();
    if (n_points < 1) throw config_error("n_points must be >= 1");
    SplitMix64 rng = derived_stream(seed, 0xC0FFEEu);
    double acc = 0.0;
    for (std::int64_t i = 0; i < n_points; ++i) {
        PhasePoint x{rng.next_double(), rng.next_double()};
        acc += detail::evolve_intensity(x, profile, t, true);
    }
    return acc / static_cast<double>(n_points);
}

}  // namespace tribaker
