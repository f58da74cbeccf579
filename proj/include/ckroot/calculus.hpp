#pragma once

// Composition, inversion and iteration of piecewise-polynomial interval
// diffeomorphisms.  Composition keeps pieces exact (polynomial-in-polynomial)
// while the degree budget allows, and otherwise re-approximates pieces by
// two-point Hermite data sampled from jet propagation; breakpoints of a
// composition f∘g are g's breakpoints united with g-preimages of f's.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "ckroot/config.hpp"
#include "ckroot/diffeo.hpp"
#include "ckroot/errors.hpp"
#include "ckroot/poly.hpp"

namespace ckroot {

// Solve p(u) = y for u in [0, h], p strictly increasing on the piece.
// Safeguarded Newton: bisection step whenever Newton leaves the bracket.
inline double solve_monotone_piece(const Poly& p, double h, double y) {
    double lo = 0.0, hi = h;
    double flo = p(lo) - y, fhi = p(hi) - y;
    if (flo > 0.0 && flo < 1e-12) return lo;
    if (fhi < 0.0 && fhi > -1e-12) return hi;
    if (flo > 0.0 || fhi < 0.0)
        raise(ErrorCode::out_of_domain, "value not bracketed by piece");
    double u = 0.5 * (lo + hi);
    for (int it = 0; it < 80; ++it) {
        const double f = p(u) - y;
        if (f == 0.0) return u;
        if (f > 0.0) hi = u; else lo = u;
        const double d = p.derivative_at(u, 1);
        double next = (d > 0.0) ? u - f / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - u) < 1e-17 * (1.0 + h)) return next;
        u = next;
    }
    return u;
}

// Pointwise inverse: x with f(x) = y.
inline double preimage(const PiecewisePolyDiffeo& f, double y) {
    if (y < -1e-12 || y > 1.0 + 1e-12)
        raise(ErrorCode::out_of_domain, "preimage argument outside [0,1]");
    y = std::clamp(y, 0.0, 1.0);
    const auto& breaks = f.breakpoints();
    std::size_t lo = 0, hi = breaks.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (f(breaks[mid]) <= y) lo = mid; else hi = mid;
    }
    const double u = solve_monotone_piece(f.pieces()[lo], breaks[lo + 1] - breaks[lo], y);
    return breaks[lo] + u;
}

namespace detail {

inline std::vector<double> merged_breakpoints(const PiecewisePolyDiffeo& f,
                                              const PiecewisePolyDiffeo& g) {
    std::vector<double> b = g.breakpoints();
    for (std::size_t i = 1; i + 1 < f.breakpoints().size(); ++i)
        b.push_back(preimage(g, f.breakpoints()[i]));
    std::sort(b.begin(), b.end());
    std::vector<double> out;
    out.reserve(b.size());
    for (double v : b) {
        if (out.empty() || v - out.back() > 1e-12) out.push_back(v);
    }
    out.front() = 0.0;
    if (1.0 - out.back() <= 1e-12) out.back() = 1.0; else out.push_back(1.0);
    return out;
}

inline std::vector<double> thin_to_budget(const std::vector<double>& b, int piece_budget) {
    const std::size_t pieces = b.size() - 1;
    if (pieces <= static_cast<std::size_t>(piece_budget)) return b;
    const std::size_t stride = (pieces + static_cast<std::size_t>(piece_budget) - 1) /
                               static_cast<std::size_t>(piece_budget);
    std::vector<double> out;
    for (std::size_t i = 0; i < b.size(); i += stride) out.push_back(b[i]);
    if (out.back() != b.back()) out.push_back(b.back());
    return out;
}

}  // namespace detail

inline PiecewisePolyDiffeo compose(const PiecewisePolyDiffeo& f, const PiecewisePolyDiffeo& g,
                                   const Config& cfg = default_config()) {
    if (g.is_identity()) return f;
    if (f.is_identity()) return g;

    std::vector<double> b = detail::merged_breakpoints(f, g);
    bool thinned = false;
    {
        std::vector<double> t = detail::thin_to_budget(b, cfg.piece_budget);
        if (t.size() != b.size()) {
            b = std::move(t);
            thinned = true;
        }
    }

    const int k_result = std::min(f.smoothness_order(), g.smoothness_order());
    const int m_fit = std::min(std::min(k_result + 1, (cfg.degree_budget - 1) / 2),
                               cfg.max_derivative_order);
    bool reapproximated = thinned;

    std::vector<double> out_breaks{b.front()};
    std::vector<Poly> out_pieces;
    std::size_t splits = 0;

    // Emit the composed piece on [bl, br]; exact polynomial composition when
    // the degree budget allows, otherwise two-point Hermite data validated
    // against direct evaluation and bisected until within tolerance.
    std::function<void(double, double, int)> process = [&](double bl, double br, int depth) {
        const std::size_t gi = g.piece_index(0.5 * (bl + br));
        const Poly g_local = g.pieces()[gi].shift_origin(bl - g.breakpoints()[gi]);
        const std::size_t fi = f.piece_index(g(0.5 * (bl + br)));
        const Poly& f_piece = f.pieces()[fi];

        const bool exact = !thinned && depth == 0 &&
                           f_piece.degree() * std::max(1, g_local.degree()) <= cfg.degree_budget;
        if (exact) {
            // f(g(bl + u)) = F(g_local(u) - t_fi) with F in its local coord.
            auto c = g_local.coeffs();
            c[0] -= f.breakpoints()[fi];
            out_pieces.push_back(f_piece.compose(Poly(std::move(c))));
            out_breaks.push_back(br);
            return;
        }

        const Jet jl = Jet::compose(f.jet_at(g(bl), m_fit), g.jet_at(bl, m_fit));
        const Jet jr = Jet::compose(f.jet_at(g(br), m_fit), g.jet_at(br, m_fit));
        Poly h = hermite_two_point(br - bl, jl.to_derivatives(), jr.to_derivatives());
        double worst = 0.0;
        for (double t : {0.25, 0.5, 0.75}) {
            const double x = bl + t * (br - bl);
            worst = std::max(worst, std::abs(h(x - bl) - f(g(x))));
        }
        if (worst > cfg.compose_tol && depth < 10 && br - bl > 64.0 * cfg.min_spacing &&
            splits < static_cast<std::size_t>(cfg.piece_budget)) {
            ++splits;
            const double mid = 0.5 * (bl + br);
            process(bl, mid, depth + 1);
            process(mid, br, depth + 1);
            return;
        }
        reapproximated = true;
        out_pieces.push_back(std::move(h));
        out_breaks.push_back(br);
    };
    for (std::size_t i = 0; i + 1 < b.size(); ++i) process(b[i], b[i + 1], 0);

    // Re-approximated joints agree only through the fitted jet order, so the
    // declared smoothness drops accordingly.
    const int declared = reapproximated ? std::min(k_result, m_fit) : k_result;
    PiecewisePolyDiffeo result(std::move(out_breaks), std::move(out_pieces), declared, cfg);
    if (reapproximated) result.mark_reapproximated();
    return result;
}

inline PiecewisePolyDiffeo invert(const PiecewisePolyDiffeo& f, const Config& cfg = default_config()) {
    if (f.is_identity()) return f;
    const int m_fit = std::min({6, f.smoothness_order() + 1, (cfg.degree_budget - 1) / 2});

    std::vector<double> xs = f.breakpoints();
    for (int round = 0; round < 10; ++round) {
        std::vector<double> ys(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = f(xs[i]);
        std::vector<std::vector<double>> data(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            Jet rev = Jet::reversion(f.jet_at(xs[i], m_fit));
            rev.a[0] = xs[i];
            data[i] = rev.to_derivatives();
        }
        ys.front() = 0.0;
        ys.back() = 1.0;
        std::vector<double> splits;
        bool valid = true;
        PiecewisePolyDiffeo candidate = PiecewisePolyDiffeo::identity();
        try {
            candidate = PiecewisePolyDiffeo::from_hermite_data(
                ys, data, std::min(m_fit, f.smoothness_order()), cfg);
        } catch (const Error&) {
            valid = false;  // overshoot between sparse nodes: refine everywhere
            for (std::size_t i = 0; i + 1 < xs.size(); ++i)
                splits.push_back(0.5 * (xs[i] + xs[i + 1]));
        }
        if (valid) {
            for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
                const double ym = 0.5 * (ys[i] + ys[i + 1]);
                const double residual = std::abs(f(candidate(ym)) - ym);
                if (residual > cfg.invert_tol) splits.push_back(preimage(f, ym));
            }
        }
        if (valid && (splits.empty() || xs.size() > 4096)) return candidate;
        if (!valid && xs.size() > 4096)
            raise(ErrorCode::approximation_failed, "inverse refinement exceeded node budget");
        xs.insert(xs.end(), splits.begin(), splits.end());
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end(),
                             [](double a, double b) { return b - a <= 1e-12; }),
                 xs.end());
    }
    raise(ErrorCode::approximation_failed, "inverse refinement did not converge");
}

inline PiecewisePolyDiffeo iterate(const PiecewisePolyDiffeo& f, int N,
                                   const Config& cfg = default_config()) {
    if (N < 1) raise(ErrorCode::precondition_violated, "iterate needs N >= 1");
    PiecewisePolyDiffeo acc = PiecewisePolyDiffeo::identity();
    PiecewisePolyDiffeo base = f;
    int n = N;
    while (n > 0) {
        if (n & 1) acc = compose(acc, base, cfg);
        n >>= 1;
        if (n > 0) base = compose(base, base, cfg);
    }
    return acc;
}

// Jet of f^N at x by pointwise orbit propagation; exact piece derivatives at
// every orbit point, no global composition object required.
inline Jet iterate_jet(const PiecewisePolyDiffeo& f, double x, int N, int order) {
    Jet cur(order);
    cur.a[0] = x;
    if (order >= 1) cur.a[1] = 1.0;
    for (int m = 0; m < N; ++m)
        cur = Jet::compose(f.jet_at(cur.value(), order), cur);
    return cur;
}

// Value of f^N at x (cheaper than the jet when only the orbit is needed).
inline double iterate_value(const PiecewisePolyDiffeo& f, double x, int N) {
    double v = x;
    for (int m = 0; m < N; ++m) v = f(v);
    return v;
}

}  // namespace ckroot
