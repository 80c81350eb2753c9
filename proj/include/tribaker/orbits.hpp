#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "tribaker/common.hpp"
#include "tribaker/map.hpp"
#include "tribaker/measure.hpp"

namespace tribaker {

// Primitive periodic orbit of the tribaker map, identified by its ternary
// itinerary. Stored in canonical form: the lexicographically minimal
// rotation (a Lyndon word).
struct SymbolicOrbit {
    std::vector<int> symbols;

    int period() const { return static_cast<int>(symbols.size()); }

    bool in_repeller() const {
        for (int s : symbols)
            if (s == 1) return false;
        return true;
    }

    std::string word() const {
        std::string w;
        for (int s : symbols) w.push_back(static_cast<char>('0' + s));
        return w;
    }

    bool operator==(const SymbolicOrbit&) const = default;
};

inline bool orbit_order(const SymbolicOrbit& a, const SymbolicOrbit& b) {
    if (a.period() != b.period()) return a.period() < b.period();
    return a.symbols < b.symbols;
}

// All primitive necklaces over the given alphabet with period in
// [1, l_max], each once, via Duval's Lyndon word generator. Sorted by
// (period, symbols).
inline std::vector<SymbolicOrbit> enumerate_orbits(int l_max, const std::vector<int>& alphabet) {
    if (l_max < 1 || l_max > 12) throw config_error("orbit period bound must lie in [1,12]");
    std::vector<int> letters = alphabet;
    std::sort(letters.begin(), letters.end());
    letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
    if (letters.empty()) throw config_error("orbit alphabet must be nonempty");
    for (int s : letters)
        if (s < 0 || s > 2) throw config_error("orbit alphabet symbols must lie in {0,1,2}");

    const int m = static_cast<int>(letters.size());
    std::vector<SymbolicOrbit> out;
    std::vector<int> w(1, 0);  // indices into letters
    while (!w.empty()) {
        // Duval emits each Lyndon word once; a Lyndon word of length
        // <= l_max is exactly a primitive necklace representative.
        SymbolicOrbit orb;
        orb.symbols.reserve(w.size());
        for (int idx : w) orb.symbols.push_back(letters[idx]);
        out.push_back(std::move(orb));
        // extend periodically to length l_max, then increment
        std::vector<int> next;
        for (int i = 0; i < l_max; ++i) next.push_back(w[i % w.size()]);
        while (!next.empty() && next.back() == m - 1) next.pop_back();
        if (!next.empty()) ++next.back();
        w = std::move(next);
    }
    std::sort(out.begin(), out.end(), orbit_order);
    return out;
}

// Convention for the one-step actions S_l entering the scar phases.
//
// quantum_phase reproduces the phase the quantized map actually attaches
// to a coherent state riding the orbit, arg<x_{l+1}|U|x_l> = 2 pi N S_l
// with S_l = e_l (q_l - e_l/3); the identity follows from the mixed
// position-momentum kernel of the baker propagator and holds to round-off.
// generating_function is the classical mixed generating function
// W(q,p') = 3 q p' - e (q + p'); it differs from the quantum phase by
// non-integer amounts and is kept selectable for comparison.
enum class ActionConvention { quantum_phase, generating_function };

inline std::string to_string(ActionConvention c) {
    return c == ActionConvention::quantum_phase ? "quantum_phase" : "generating_function";
}

inline ActionConvention action_convention_from_string(const std::string& s) {
    if (s == "quantum_phase") return ActionConvention::quantum_phase;
    if (s == "generating_function") return ActionConvention::generating_function;
    throw config_error("unknown action convention: " + s);
}

// Orbit geometry with exact rational coordinates: every point has
// denominator 3^L - 1, so periodicity under the map is checked in integer
// arithmetic and never drifts.
struct OrbitGeometry {
    SymbolicOrbit orbit;
    std::vector<PhasePoint> points;        // floating-point view of the rationals
    std::vector<std::int64_t> q_num, p_num;  // numerators over `den`, reduced mod den
    std::int64_t den = 1;                  // 3^L - 1
    std::vector<double> step_actions;      // S_l, one per step
    double total_action = 0.0;             // S_gamma
    bool in_repeller = false;
    ActionConvention convention = ActionConvention::quantum_phase;
};

// Builds the geometry from the itinerary: the ternary expansion of the
// word gives q_0, the reversed word gives p_0, and the rest follows by
// iterating the map exactly.
inline OrbitGeometry orbit_geometry(const SymbolicOrbit& orbit,
                                    ActionConvention conv = ActionConvention::quantum_phase) {
    const int L = orbit.period();
    if (L < 1 || L > 12) throw config_error("orbit period out of range");

    OrbitGeometry g;
    g.orbit = orbit;
    g.in_repeller = orbit.in_repeller();

    std::int64_t den = 1;
    for (int i = 0; i < L; ++i) den *= 3;
    den -= 1;  // 3^L - 1
    g.den = den;

    std::int64_t nq = 0, np = 0;
    for (int j = 0; j < L; ++j) {
        nq = nq * 3 + orbit.symbols[j];
        np = np * 3 + orbit.symbols[L - 1 - j];
    }

    // Iterate with unreduced numerators in [0, den] so the symbol-dictated
    // branch closes exactly even on the corner orbit (the all-2 word sits
    // at q = p = 1, which the torus identifies with 0). Stored points and
    // numerators are reduced; actions use the unreduced lift, which only
    // shifts them by integers.
    std::vector<std::int64_t> raw_q(L), raw_p(L);
    const std::int64_t nq0 = nq, np0 = np;
    g.q_num.resize(L);
    g.p_num.resize(L);
    g.points.resize(L);
    for (int j = 0; j < L; ++j) {
        raw_q[j] = nq;
        raw_p[j] = np;
        g.q_num[j] = nq % den;
        g.p_num[j] = np % den;
        g.points[j] = {static_cast<double>(g.q_num[j]) / den, static_cast<double>(g.p_num[j]) / den};
        const int e = orbit.symbols[j];
        const std::int64_t nq2 = 3 * nq - static_cast<std::int64_t>(e) * den;
        const std::int64_t psum = np + static_cast<std::int64_t>(e) * den;
        if (psum % 3 != 0)
            throw numerical_error("orbit momentum numerator not divisible by 3 (symbol/point mismatch)");
        if (nq2 < 0 || nq2 > den)
            throw numerical_error("orbit position numerator left [0, 3^L-1]");
        nq = nq2;
        np = psum / 3;
    }
    if (nq != nq0 || np != np0) throw numerical_error("orbit failed to close after L steps");

    g.convention = conv;
    g.step_actions.resize(L);
    g.total_action = 0.0;
    for (int j = 0; j < L; ++j) {
        const double q = static_cast<double>(raw_q[j]) / den;
        const int e = orbit.symbols[j];
        double s;
        if (conv == ActionConvention::quantum_phase) {
            s = e * (q - e / 3.0);
        } else {
            const double pn = static_cast<double>(raw_p[(j + 1) % L]) / den;
            s = 3.0 * q * pn - e * (q + pn);
        }
        g.step_actions[j] = s;
        g.total_action += s;
    }
    return g;
}

struct RankedOrbit {
    OrbitGeometry geometry;
    double score = 0.0;  // mean measure over the cells the orbit visits
};

// Orbits outside the repeller ranked by the measure they sit on, highest
// first; ties fall back to (shorter period, lexicographic symbols). Top
// n_max returned.
inline std::vector<RankedOrbit> rank_outside_orbits(const std::vector<OrbitGeometry>& orbits,
                                                    const MeasureGrid& mu, int n_max) {
    std::vector<RankedOrbit> ranked;
    for (const auto& g : orbits) {
        if (g.in_repeller) continue;
        double acc = 0.0;
        for (const auto& pt : g.points) {
            int a = static_cast<int>(pt.q * mu.k);
            int b = static_cast<int>(pt.p * mu.k);
            a = std::min(std::max(a, 0), mu.k - 1);
            b = std::min(std::max(b, 0), mu.k - 1);
            acc += mu.at(a, b);
        }
        ranked.push_back({g, acc / g.points.size()});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedOrbit& x, const RankedOrbit& y) {
        if (x.score != y.score) return x.score > y.score;
        return orbit_order(x.geometry.orbit, y.geometry.orbit);
    });
    if (n_max >= 0 && ranked.size() > static_cast<std::size_t>(n_max))
        ranked.resize(static_cast<std::size_t>(n_max));
    return ranked;
}

}  // namespace tribaker
