#pragma once

// Sampled C^k distances between interval diffeomorphisms and the endpoint /
// fixed-point analysis that gates root construction.  Suprema are taken over
// a uniform grid united with both operands' breakpoints, then sharpened once
// per order by a local quadratic fit around the sampled argmax.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ckroot/config.hpp"
#include "ckroot/diffeo.hpp"
#include "ckroot/errors.hpp"
#include "ckroot/poly.hpp"

namespace ckroot {

struct CkNormReport {
    int order = 0;                  // highest derivative order compared
    std::vector<double> per_order;  // per_order[j] = sup_x |f^(j)(x) - g^(j)(x)|
    std::vector<double> argmax;     // sample point attaining per_order[j]
    double overall = 0.0;           // max over orders 0..order
};

namespace detail {

inline std::vector<double> norm_sample_grid(const PiecewisePolyDiffeo& f,
                                            const PiecewisePolyDiffeo& g,
                                            const Config& cfg) {
    std::vector<double> xs;
    const int n = std::max(64, cfg.sample_density);
    xs.reserve(static_cast<std::size_t>(n) + f.breakpoints().size() + g.breakpoints().size());
    for (int i = 0; i <= n; ++i) xs.push_back(static_cast<double>(i) / n);
    xs.insert(xs.end(), f.breakpoints().begin(), f.breakpoints().end());
    xs.insert(xs.end(), g.breakpoints().begin(), g.breakpoints().end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

// Parabola-vertex sharpening of a sampled sup: one refinement around the
// argmax using the two neighbouring samples.
inline void refine_argmax(const PiecewisePolyDiffeo& f, const PiecewisePolyDiffeo& g,
                          const std::vector<double>& xs, std::size_t best, int j,
                          double& value, double& where) {
    if (best == 0 || best + 1 >= xs.size()) return;
    // Refinement only makes sense at the resolution of the sample grid; when
    // the flanking samples are closer than the grid was designed to resolve
    // (dense breakpoint clusters), the sampled values already tell the story
    // and evaluating between them would probe sub-sample micro-structure.
    if (xs[best + 1] - xs[best - 1] < 1e-6) return;
    auto diff_at = [&](double x) {
        return f.jet_at(x, j).to_derivatives()[static_cast<std::size_t>(j)] -
               g.jet_at(x, j).to_derivatives()[static_cast<std::size_t>(j)];
    };
    const double xm = xs[best - 1], x0 = xs[best], xp = xs[best + 1];
    const double s = (diff_at(x0) >= 0.0) ? 1.0 : -1.0;
    const double fm = s * diff_at(xm), f0 = s * diff_at(x0), fp = s * diff_at(xp);
    // Quadratic through the three samples (possibly non-uniform spacing).
    const double hl = x0 - xm, hr = xp - x0;
    const double denom = hl * fp + hr * fm - (hl + hr) * f0;
    if (denom >= 0.0) return;  // not locally concave: keep the sampled value
    const double num = hl * hl * (f0 - fp) - hr * hr * (f0 - fm);
    const double den = hl * (f0 - fp) + hr * (f0 - fm);
    if (den <= 0.0) return;
    const double xv = x0 + 0.5 * num / den;
    if (!(xv > xm && xv < xp)) return;
    const double fv = s * diff_at(xv);
    if (fv > value) {
        value = fv;
        where = xv;
    }
}

}  // namespace detail

// Per-order sampled sup norms of f - g up to derivative order k.
inline CkNormReport ck_distance_report(const PiecewisePolyDiffeo& f, const PiecewisePolyDiffeo& g,
                                       int k, const Config& cfg = default_config()) {
    if (k < 0) raise(ErrorCode::precondition_violated, "negative derivative order");
    const int k_allowed = std::min(f.smoothness_order(), g.smoothness_order());
    if (k > k_allowed)
        raise(ErrorCode::order_too_high, "requested order exceeds the smoothness class");

    const std::vector<double> xs = detail::norm_sample_grid(f, g, cfg);
    CkNormReport report;
    report.order = k;
    report.per_order.assign(static_cast<std::size_t>(k) + 1, 0.0);
    report.argmax.assign(static_cast<std::size_t>(k) + 1, 0.0);
    std::vector<std::size_t> best_index(static_cast<std::size_t>(k) + 1, 0);

    for (std::size_t i = 0; i < xs.size(); ++i) {
        const std::vector<double> df = f.jet_at(xs[i], k).to_derivatives();
        const std::vector<double> dg = g.jet_at(xs[i], k).to_derivatives();
        for (int j = 0; j <= k; ++j) {
            const double v = std::abs(df[static_cast<std::size_t>(j)] -
                                      dg[static_cast<std::size_t>(j)]);
            if (v > report.per_order[static_cast<std::size_t>(j)]) {
                report.per_order[static_cast<std::size_t>(j)] = v;
                report.argmax[static_cast<std::size_t>(j)] = xs[i];
                best_index[static_cast<std::size_t>(j)] = i;
            }
        }
    }
    for (int j = 0; j <= k; ++j)
        detail::refine_argmax(f, g, xs, best_index[static_cast<std::size_t>(j)], j,
                              report.per_order[static_cast<std::size_t>(j)],
                              report.argmax[static_cast<std::size_t>(j)]);
    report.overall = *std::max_element(report.per_order.begin(), report.per_order.end());
    return report;
}

inline double ck_distance(const PiecewisePolyDiffeo& f, const PiecewisePolyDiffeo& g, int k,
                          const Config& cfg = default_config()) {
    return ck_distance_report(f, g, k, cfg).overall;
}

// C^k size of a diffeomorphism, measured as distance to the identity.
inline double ck_norm(const PiecewisePolyDiffeo& f, int k, const Config& cfg = default_config()) {
    return ck_distance(f, PiecewisePolyDiffeo::identity(), k, cfg);
}

struct AnalysisReport {
    bool is_identity = false;
    int direction = 0;           // +1: f >= id with strict interior excess, -1: f <= id, 0: mixed
    bool fixed_point_free = false;  // no fixed points in the open interval
    int flat_order = 0;          // largest probed j with identity contact at both endpoints
    bool ck_flat = false;        // flat_order >= requested order
    CkNormReport norms;          // distance to the identity through the requested order
};

// Endpoint flatness, interior fixed points and displacement direction; the
// gates checked before attempting a root construction.
inline AnalysisReport analyze(const PiecewisePolyDiffeo& f, int k,
                              const Config& cfg = default_config()) {
    if (k < 1) raise(ErrorCode::precondition_violated, "analysis order must be >= 1");
    AnalysisReport report;
    report.is_identity = f.is_identity();
    report.norms = ck_distance_report(f, PiecewisePolyDiffeo::identity(),
                                      std::min(k, f.smoothness_order()), cfg);

    // Displacement sign over interior samples.  Flat families legitimately
    // dip below the detection tolerance near the endpoints, so below-tolerance
    // samples only count as interior fixed points when they occur strictly
    // between above-tolerance ones.
    const int n = std::max(64, cfg.sample_density);
    std::vector<int> flag;
    flag.reserve(static_cast<std::size_t>(n) - 1);
    bool any_pos = false, any_neg = false;
    for (int i = 1; i < n; ++i) {
        const double x = static_cast<double>(i) / n;
        const double d = f(x) - x;
        if (d > cfg.fixed_point_tol) { flag.push_back(+1); any_pos = true; }
        else if (d < -cfg.fixed_point_tol) { flag.push_back(-1); any_neg = true; }
        else flag.push_back(0);
    }
    if (any_pos && !any_neg) report.direction = +1;
    else if (any_neg && !any_pos) report.direction = -1;
    else report.direction = 0;
    bool interior_zero = false;
    {
        std::size_t first = flag.size(), last = 0;
        for (std::size_t i = 0; i < flag.size(); ++i)
            if (flag[i] != 0) { first = std::min(first, i); last = i; }
        for (std::size_t i = first; i < std::min(last + 1, flag.size()); ++i)
            if (flag[i] == 0) interior_zero = true;
    }
    report.fixed_point_free = !report.is_identity && report.direction != 0 && !interior_zero;

    // Endpoint contact with the identity, probed one order at a time.
    int max_piece_degree = 0;
    for (const Poly& p : f.pieces()) max_piece_degree = std::max(max_piece_degree, p.degree());
    const int probe_cap = std::min(cfg.max_derivative_order, std::max(k + 1, max_piece_degree + 1));
    const Jet j0 = f.jet_at(0.0, probe_cap);
    const Jet j1 = f.jet_at(1.0, probe_cap);
    const std::vector<double> d0 = j0.to_derivatives();
    const std::vector<double> d1 = j1.to_derivatives();
    auto flat_through = [&](int j) {
        if (j == 0) return std::abs(d0[0]) <= cfg.flat_tol && std::abs(d1[0] - 1.0) <= cfg.flat_tol;
        if (j == 1) return std::abs(d0[1] - 1.0) <= cfg.flat_tol && std::abs(d1[1] - 1.0) <= cfg.flat_tol;
        return std::abs(d0[static_cast<std::size_t>(j)]) <= cfg.flat_tol &&
               std::abs(d1[static_cast<std::size_t>(j)]) <= cfg.flat_tol;
    };
    int flat = -1;
    for (int j = 0; j <= probe_cap; ++j) {
        if (!flat_through(j)) break;
        flat = j;
    }
    report.flat_order = flat;
    report.ck_flat = flat >= k;
    return report;
}

}  // namespace ckroot
