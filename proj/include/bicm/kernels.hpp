#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace bicm {

// LLR clamp used throughout the receiver chain.
inline constexpr double kLlrMax = 20.0;
// tanh^-1 input clip; bounds check-node messages to 2*atanh(1-1e-7).
inline constexpr double kAtanhClip = 1e-7;

inline double clampd(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

// log(1 + e^x), overflow-safe
inline double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

// log2(1 + e^x)
inline double log2_1p_exp(double x) { return softplus(x) * 1.4426950408889634074; }

// Odd-exact by construction: BP's channel symmetry (negated inputs give
// negated outputs, bit for bit) relies on these, and libm's tanh/atanh are
// not guaranteed odd to the last ulp.
inline double atanh_clamped(double x) {
    double a = std::abs(x);
    if (a > 1.0 - kAtanhClip) a = 1.0 - kAtanhClip;
    double v = std::atanh(a);
    return x < 0.0 ? -v : v;
}

inline double tanh_half_odd(double x) {
    double t = std::tanh(0.5 * std::abs(x));
    return x < 0.0 ? -t : t;
}

namespace detail {

// Dot product with a fixed 8-lane accumulation order. The lane structure is
// independent of everything except n, so results are bit-identical no matter
// how rows are batched; the independent lanes also let the compiler emit SIMD
// FMA without reassociating.
inline double dot8(const double* a, const double* b, int n) {
    double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    int k = 0;
    for (; k + 8 <= n; k += 8)
        for (int i = 0; i < 8; ++i) acc[i] += a[k + i] * b[k + i];
    for (int i = 0; k + i < n; ++i) acc[i] += a[k + i] * b[k + i];
    return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
}

}  // namespace detail

enum class Act { linear, relu, sigmoid, tanh };

// y[o] = act(dot(x, W_row_o) + b[o]); W row-major (out x in).
// Out-of-line single implementation shared by the tape and the plain
// evaluation paths, so both produce bit-identical values row by row.
void dense_row(const double* x, const double* w, const double* b, double* y, int in, int out, Act act);

}  // namespace bicm
