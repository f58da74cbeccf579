#pragma once

// Shared oracle helpers for the test suites.  Everything here is computed
// independently of the library (closed forms, finite differences, brute
// force) so library results are checked against frozen external values.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "ckroot/errors.hpp"

namespace oracle {

// j-th derivative by the iterated central-difference stencil
// sum_i (-1)^i C(j,i) f(x + (j/2 - i) h) / h^j, error O(h^2).
template <class F>
double central_diff(F&& f, double x, int j, double h) {
    if (j == 0) return f(x);
    std::vector<double> binom(static_cast<std::size_t>(j) + 1, 0.0);
    binom[0] = 1.0;
    for (int row = 1; row <= j; ++row)
        for (int i = row; i > 0; --i) binom[static_cast<std::size_t>(i)] += binom[static_cast<std::size_t>(i - 1)];
    double acc = 0.0;
    for (int i = 0; i <= j; ++i) {
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        acc += sign * binom[static_cast<std::size_t>(i)] * f(x + (0.5 * j - i) * h);
    }
    return acc / std::pow(h, j);
}

// Closed forms for the flat displacement family x + c [x(1-x)]^(k+1).
inline double bump(double c, int k, double x) {
    return x + c * std::pow(x * (1.0 - x), k + 1);
}
inline double bump_d1(double c, int k, double x) {
    return 1.0 + c * (k + 1) * std::pow(x * (1.0 - x), k) * (1.0 - 2.0 * x);
}

// Pointwise functional inverse by bisection-safeguarded Newton on [0,1].
template <class F>
double invert_at(F&& f, double y, double tol = 1e-14) {
    double lo = 0.0, hi = 1.0, x = y;
    for (int it = 0; it < 200; ++it) {
        const double v = f(x) - y;
        if (std::abs(v) < tol) return x;
        if (v > 0.0) hi = x; else lo = x;
        const double d = central_diff(f, std::clamp(x, 1e-6, 1.0 - 1e-6), 1, 1e-6);
        double nx = (d > 0.0) ? x - v / d : 0.5 * (lo + hi);
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        x = nx;
    }
    return x;
}

// Minimal monotone-segment cover with shared boundary elements; the
// quasi-monotone degree is (segment count - 1), at least 1.
inline int quasi_degree_bruteforce(const std::vector<double>& s) {
    const std::size_t n = s.size();
    auto monotone = [&](std::size_t a, std::size_t b) {
        bool up = true, down = true;
        for (std::size_t i = a; i < b; ++i) {
            if (s[i + 1] < s[i]) up = false;
            if (s[i + 1] > s[i]) down = false;
        }
        return up || down;
    };
    const std::size_t kInf = 1u << 20;
    std::vector<std::size_t> best(n, kInf);
    best[0] = 0;
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (best[j] != kInf && monotone(j, i)) best[i] = std::min(best[i], best[j] + 1);
    const std::size_t segments = best[n - 1];
    return static_cast<int>(std::max<std::size_t>(1, segments == kInf ? 1 : segments - 1));
}

// Captures the library error code thrown by `fn`, if any.
template <class F>
std::optional<ckroot::ErrorCode> thrown_code(F&& fn) {
    try {
        fn();
    } catch (const ckroot::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

inline std::mt19937& rng() {
    static std::mt19937 gen(12345);
    return gen;
}

}  // namespace oracle
