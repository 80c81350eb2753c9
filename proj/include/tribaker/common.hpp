#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tribaker {

using cplx = std::complex<double>;

inline constexpr double two_pi = 6.283185307179586476925286766559;

// Exit-code-bearing error categories. The CLI maps these to process exit
// codes: config_error -> 2, numerical_error -> 3, resource_error -> 4.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reduce to the fundamental domain [0,1).
inline double mod1(double x) {
    double y = x - std::floor(x);
    if (y >= 1.0) y -= 1.0;  // guards x = -eps, where floor rounding gives y == 1
    return y;
}

// Wrap an angle difference into (-pi, pi].
inline double wrap_angle(double a) {
    double w = std::remainder(a, two_pi);
    return w;
}

// Cosine similarity of two equally sized nonnegative grids (flattened).
// Returns 0 when either vector has zero norm.
inline double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw config_error("cosine_similarity: size mismatch");
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline bool is_power_of_three(long long n) {
    if (n < 1) return false;
    while (n % 3 == 0) n /= 3;
    return n == 1;
}

}  // namespace tribaker
