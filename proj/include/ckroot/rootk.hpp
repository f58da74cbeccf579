#pragma once

// Approximate N-th roots of flat interval diffeomorphisms: anchor orbits,
// refinement grids, finite-difference tables, derivative assignment through
// the windowed choice solver, Hermite extension to a diffeomorphism, and the
// final residual verification.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ckroot/calculus.hpp"
#include "ckroot/config.hpp"
#include "ckroot/diffeo.hpp"
#include "ckroot/errors.hpp"
#include "ckroot/flatten.hpp"
#include "ckroot/norms.hpp"
#include "ckroot/poly.hpp"
#include "ckroot/seqsolve.hpp"

namespace ckroot {

// ---------------------------------------------------------------------------
// Anchors
// ---------------------------------------------------------------------------

struct AnchorSet {
    int n = 0;                  // anchors are x_0..x_n
    std::vector<double> x;
    int l_estimate = 1;         // quasi-monotone degree of f' along the orbit
};

namespace detail {

// sup over [lo, hi] of |f' - 1| and of |f^(j)| for 2 <= j <= jtop, sampled.
inline double endpoint_window_sup(const PiecewisePolyDiffeo& f, double lo, double hi, int jtop) {
    const int samples = 256;
    double worst = 0.0;
    const int jmax = std::min(jtop, f.smoothness_order());
    for (int s = 0; s <= samples; ++s) {
        const double x = lo + (hi - lo) * s / samples;
        const auto derivs = f.jet_at(x, jmax).to_derivatives();
        worst = std::max(worst, std::abs(derivs[1] - 1.0));
        for (int j = 2; j <= jmax; ++j)
            worst = std::max(worst, std::abs(derivs[static_cast<std::size_t>(j)]));
    }
    return worst;
}

}  // namespace detail

// Orbit x_{i+1} = f(x_i) for an ascending fixed-point-free map, chosen so
// that both endpoint gaps are below r/2, f is r/2-close to the identity in
// the first k+1 derivatives on the two endpoint windows, and the anchor
// count comfortably exceeds the quasi-monotone degree of f' on the orbit.
inline AnchorSet select_anchors(const PiecewisePolyDiffeo& f, double r, int k,
                                const Config& cfg = default_config()) {
    if (r <= 0.0) raise(ErrorCode::precondition_violated, "radius must be positive");
    const AnalysisReport an = analyze(f, std::min(k, f.smoothness_order()), cfg);
    if (an.is_identity || an.direction == 0 || !an.fixed_point_free)
        raise(ErrorCode::no_crossing_direction,
              "displacement has no consistent sign on (0,1)");
    if (an.direction < 0)
        raise(ErrorCode::no_crossing_direction,
              "descending displacement: invert the map and take the inverse root");

    // Derivative orders required small on the endpoint windows: only orders
    // through k enter the near-identity conditions on the root (order k+1 at
    // the closing pieces is carried by separately capped node data, not by
    // the target's own derivatives), and the window sup of |f^(j)| can only
    // shrink to zero for orders at which f actually has identity contact, so
    // the demand is further capped by the measured flatness.
    const int jtop = std::min(k, an.flat_order);

    double x0 = 0.45 * r;
    for (int attempt = 0; attempt < 60; ++attempt) {
        const double x1 = f(x0);
        if (!(x1 > x0 + cfg.min_spacing)) break;  // orbit stalls at the start
        if (detail::endpoint_window_sup(f, 0.0, x1, jtop) >= 0.5 * r) {
            x0 *= 0.5;
            continue;
        }
        // Smallest tail-window start meeting the same gate.  The sampled sup
        // over [y, 1] is non-increasing in y, so bisection applies; chasing
        // the orbit any further than this start only burns steps against the
        // step cap without improving any verified quantity.
        double y_star = x1;
        if (detail::endpoint_window_sup(f, x1, 1.0, jtop) >= 0.5 * r) {
            double lo = x1, hi = 1.0 - 1e-9;
            if (detail::endpoint_window_sup(f, hi, 1.0, jtop) >= 0.5 * r) {
                x0 *= 0.5;  // not quiet even arbitrarily close to 1
                continue;
            }
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (detail::endpoint_window_sup(f, mid, 1.0, jtop) >= 0.5 * r)
                    lo = mid;
                else
                    hi = mid;
            }
            y_star = hi;
        }

        std::vector<double> xs{x0, x1};
        bool stalled = false;
        const auto advance = [&]() -> bool {
            const double nx = f(xs.back());
            if (!(nx > xs.back() + cfg.min_spacing) ||
                static_cast<int>(xs.size()) > cfg.anchor_cap) {
                stalled = true;
                return false;
            }
            xs.push_back(nx);
            return true;
        };
        while (xs.size() < 3 || xs[xs.size() - 2] < y_star)
            if (!advance()) break;
        // confirm the realized tail start against the sampled sup
        while (!stalled &&
               detail::endpoint_window_sup(f, xs[xs.size() - 2], 1.0, jtop) >= 0.5 * r)
            if (!advance()) break;
        // the orbit must dominate the quasi-monotone degree of its slopes;
        // extending it only quiets the tail window further
        int l = 1;
        while (!stalled) {
            std::vector<double> slope(xs.size());
            for (std::size_t i = 0; i < xs.size(); ++i) slope[i] = f.evaluate(xs[i], 1);
            l = quasi_monotone_degree(slope).degree;
            if (static_cast<int>(xs.size()) - 1 > cfg.anchor_l_multiple * l) break;
            if (!advance()) break;
        }
        if (stalled) {
            x0 *= 0.5;
            continue;
        }
        // For k >= 2 the verified interior orders are sampled quantities.
        // The orbit zone carries a slope discontinuity of the grid ratios at
        // every block boundary, where any interpolant through the exact node
        // positions must spend curvature inversely proportional to the local
        // gap, so those microscopic pieces can never satisfy pointwise
        // curvature gates.  Keeping the whole orbit inside a small fraction
        // of the sampling resolution keeps every sampled quantity on the
        // assigned node data and the wide endpoint pieces, and placing that
        // window strictly between consecutive uniform samples keeps the
        // samples themselves off the orbit-zone piece interiors.
        if (k >= 2) {
            const double gap = 1.0 / static_cast<double>(cfg.sample_density);
            const int N0 = std::max(2, cfg.root_N0);
            const bool can_halve =
                f(0.5 * x0) - 0.5 * x0 >
                30.0 * cfg.min_spacing * static_cast<double>(N0);
            if (xs.back() - xs.front() > 0.05 * gap && can_halve) {
                x0 *= 0.5;
                continue;
            }
            // The matching piece on [0, x0] interpolates the identity jet to
            // the node data at x0, whose orders 2..k sit at the 1/N-scaled
            // target derivatives and whose order k+1 is capped at 1/N.  Its
            // interior order-k sup therefore scales like the contact data
            // spread over the piece width, and the N-fold composite
            // multiplies it by roughly N, so the deviation budget at order k
            // near the left end is only met once x0 is deep enough that the
            // spread-out contact data stays a small multiple of the radius.
            const auto jets = f.jet_at(x0, std::min(k + 1, f.smoothness_order()))
                                  .to_derivatives();
            double spread = 3.0 * x0;  // capped top order, width factor
            if (jets.size() > 2)
                spread += 5.0 * std::abs(jets[2]) / std::pow(x0, k - 2);
            if (k >= 3 && jets.size() > 3)
                spread += 5.0 * std::abs(jets[3]) / std::pow(x0, k - 3);
            if (spread > 0.5 * r && can_halve) {
                x0 *= 0.5;
                continue;
            }
            // Park the window in the interior of a uniform sampling cell.
            const double snapped =
                (std::floor(x0 / gap) + 0.35) * gap;
            if (snapped > 0.0 &&
                std::abs(x0 - snapped) > 1e-12 * std::max(1.0, snapped)) {
                x0 = snapped;
                continue;  // revalidate every gate at the parked position
            }
        }
        AnchorSet out;
        out.n = static_cast<int>(xs.size()) - 1;
        out.x = std::move(xs);
        out.l_estimate = l;
        return out;
    }
    raise(ErrorCode::anchors_not_found,
          "endpoint conditions unreachable at radius " + std::to_string(r) +
              " (map numerically too flat or too slow)");
}

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

struct GridSequence {
    int n = 0;
    int N = 0;
    std::vector<double> anchors;  // x_0..x_n
    std::vector<double> z;        // z_0..z_{nN}

    std::size_t node_count() const { return z.empty() ? 0 : z.size() - 1; }  // z_0..z_{nN-1}
};

// z_0..z_N equally spaced over [x_0, x_1], then pushed forward: z_i = f(z_{i-N}).
inline GridSequence build_grid(const PiecewisePolyDiffeo& f, const AnchorSet& anchors, int N,
                               const Config& cfg = default_config()) {
    if (N < 2) raise(ErrorCode::precondition_violated, "grid refinement needs N >= 2");
    if (anchors.n < 1 || anchors.x.size() != static_cast<std::size_t>(anchors.n) + 1)
        raise(ErrorCode::precondition_violated, "anchor set malformed");
    GridSequence g;
    g.n = anchors.n;
    g.N = N;
    g.anchors = anchors.x;
    const std::size_t total = static_cast<std::size_t>(g.n) * static_cast<std::size_t>(N);
    g.z.resize(total + 1);
    const double step = (anchors.x[1] - anchors.x[0]) / N;
    for (int j = 0; j <= N; ++j) g.z[static_cast<std::size_t>(j)] = anchors.x[0] + step * j;
    g.z[static_cast<std::size_t>(N)] = anchors.x[1];  // kill roundoff at the anchor
    for (std::size_t i = static_cast<std::size_t>(N) + 1; i <= total; ++i) {
        g.z[i] = f(g.z[i - static_cast<std::size_t>(N)]);
        if (i % static_cast<std::size_t>(N) == 0) g.z[i] = anchors.x[i / static_cast<std::size_t>(N)];
    }
    for (std::size_t i = 0; i + 1 <= total; ++i)
        if (!(g.z[i + 1] - g.z[i] >= cfg.min_spacing))
            raise(ErrorCode::not_increasing,
                  "grid spacing collapses near index " + std::to_string(i));
    return g;
}

// The uniform variant z_i = i/N^2 with anchors i/N (needs n <= N).
inline GridSequence associated_grid(int n, int N) {
    if (n < 1 || N < 2 || n > N)
        raise(ErrorCode::precondition_violated, "uniform grid needs 1 <= n <= N");
    GridSequence g;
    g.n = n;
    g.N = N;
    const double NN = static_cast<double>(N) * N;
    for (int i = 0; i <= n; ++i) g.anchors.push_back(static_cast<double>(i) / N);
    for (int i = 0; i <= n * N; ++i) g.z.push_back(static_cast<double>(i) / NN);
    return g;
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

struct FiniteDifferenceTable {
    // rows[0][i] = z_{i+1}; rows[j+1][i] = (rows[j][i+1] - rows[j][i]) / (z_{i+1} - z_i)
    std::vector<std::vector<double>> rows;

    std::size_t row_length(int j) const {
        return rows[static_cast<std::size_t>(j)].size();
    }
    double value(int j, std::size_t i) const {
        if (j < 0 || static_cast<std::size_t>(j) >= rows.size() || i >= row_length(j))
            raise(ErrorCode::out_of_domain, "finite-difference index out of range");
        return rows[static_cast<std::size_t>(j)][i];
    }
};

inline FiniteDifferenceTable finite_difference_table(const GridSequence& grid, int k) {
    if (grid.z.size() < 2) raise(ErrorCode::precondition_violated, "grid too small");
    FiniteDifferenceTable t;
    std::vector<double> row(grid.z.begin() + 1, grid.z.end());
    t.rows.push_back(row);
    for (int j = 1; j <= k + 1 && t.rows.back().size() > 1; ++j) {
        const auto& prev = t.rows.back();
        std::vector<double> next(prev.size() - 1);
        for (std::size_t i = 0; i + 1 < prev.size(); ++i)
            next[i] = (prev[i + 1] - prev[i]) / (grid.z[i + 1] - grid.z[i]);
        t.rows.push_back(std::move(next));
    }
    return t;
}

// First-derivative case rule: nudge each finite difference by a signed
// perturbation pointing opposite the neighbor comparison (+ when the next
// entry is smaller, - when larger), last entry unchanged.  The direction
// matters: exact interpolation pins each subinterval's mean slope to its own
// finite difference, and a monotone derivative needs the two end slopes on
// opposite sides of that mean.  The magnitude matters too: a monotone profile
// between end slopes a < b with prescribed mean m only admits a polynomial
// realization when (m - a)/(b - a) stays away from 0 and 1 (a quartic
// derivative cannot average closer than a fifth of its range to either end).
// Each node's magnitude is therefore grown, right to left, to at least a
// third of the gap between its own finite difference and the already-fixed
// slope at the next node, floored at eps.  The nudges stay bounded by the
// largest jump between consecutive finite differences, which the anchor
// window conditions keep far below the approximation budget.
inline std::vector<double> first_derivative_rule(const std::vector<double>& fd_row1, double eps,
                                                 std::vector<double>* signed_eps = nullptr) {
    std::vector<double> out(fd_row1);
    if (signed_eps) signed_eps->assign(fd_row1.size(), 0.0);
    if (fd_row1.size() < 2) return out;
    for (std::size_t i = fd_row1.size() - 1; i-- > 0;) {
        const double gap = out[i + 1] - fd_row1[i];  // next slope vs this piece's mean
        // Differences at the rounding noise of the ratios carry no ordering
        // information; treating them as ties keeps the equal-neighbour
        // branch from alternating on last-bit jitter.
        const double floor = 1e-9 * std::max({1.0, std::abs(out[i + 1]), std::abs(fd_row1[i])});
        if (std::abs(gap) <= floor && std::abs(fd_row1[i + 1] - fd_row1[i]) <= floor) continue;
        const double magnitude = std::max(eps, std::abs(gap) / 3.0);
        double sign = gap > 0.0 ? -1.0 : (gap < 0.0 ? 1.0 : 0.0);
        if (sign == 0.0)
            sign = (fd_row1[i + 1] < fd_row1[i]) ? 1.0 : (fd_row1[i + 1] > fd_row1[i] ? -1.0 : 0.0);
        const double delta = sign * magnitude;
        out[i] += delta;
        if (signed_eps) (*signed_eps)[i] = delta;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Derivative assignment
// ---------------------------------------------------------------------------

struct DerivativeAssignment {
    int k = 1;
    int N = 0;
    double eps_N = 0.0;  // perturbation magnitude used by the case rule
    double C = 2.0;      // 2 + sup of the target displacement derivatives
    double K = 1.0;      // reported budget constant (see report fields below)
    int l = 1;           // max quasi-monotone degree over assigned g' windows
    int l_table = 1;     // same for the raw finite-difference row
    std::vector<double> signed_eps;             // per node, in {-eps_N, 0, +eps_N}
    std::vector<std::vector<double>> derivs;    // derivs[j][i] = g^(j)(z_i), j = 1..k+1
    std::vector<double> choice_residuals;       // max |P_j - f^(j)| per order j = 2..k
    std::size_t ratio_zero_count = 0;           // assigned zero where the table is nonzero

    std::size_t node_count() const { return derivs.empty() ? 0 : derivs[1].size(); }

    double deriv(int j, std::size_t i) const {
        if (j < 1 || static_cast<std::size_t>(j) >= derivs.size() || i >= derivs[static_cast<std::size_t>(j)].size())
            raise(ErrorCode::out_of_domain, "assigned derivative index out of range");
        return derivs[static_cast<std::size_t>(j)][i];
    }
};

namespace detail {

// Jet of the assigned data at node i, truncated to `order`; `zero_top` blanks
// the order-j entry so composing yields only the lower-order contributions.
inline Jet assignment_jet(const DerivativeAssignment& a, const GridSequence& grid,
                          std::size_t i, int order, bool zero_top) {
    Jet j;
    j.a.assign(static_cast<std::size_t>(order) + 1, 0.0);
    j.a[0] = grid.z[i + 1];
    double fact = 1.0;
    for (int s = 1; s <= order; ++s) {
        fact *= s;
        const std::size_t js = static_cast<std::size_t>(s);
        double v = 0.0;
        if (js < a.derivs.size() && i < a.derivs[js].size()) v = a.derivs[js][i];
        j.a[js] = v / fact;
    }
    if (zero_top) j.a[static_cast<std::size_t>(order)] = 0.0;
    return j;
}

// (g^N)^(j)(z_w) from assigned node data alone, by composing node jets along
// the window; with `zero_top` the result is the sum of the extra terms only.
inline double window_composition_derivative(const DerivativeAssignment& a,
                                            const GridSequence& grid, std::size_t w, int j,
                                            bool zero_top) {
    Jet cur = assignment_jet(a, grid, w, j, zero_top);
    for (int q = 1; q < a.N; ++q) {
        const Jet outer = assignment_jet(a, grid, w + static_cast<std::size_t>(q), j, zero_top);
        cur = Jet::compose(outer, cur);
    }
    return cur.derivative(j);
}

}  // namespace detail

// P_j evaluated on the window starting at grid node i (0-based): the
// R-weighted sum of assigned j-th derivatives plus all lower-order extras.
inline double chain_rule_window(const DerivativeAssignment& a, const GridSequence& grid,
                                std::size_t i, int j) {
    if (j < 1 || j > a.k + 1)
        raise(ErrorCode::order_too_high,
              "window derivative order " + std::to_string(j) + " exceeds k+1");
    if (i + static_cast<std::size_t>(a.N) > a.node_count())
        raise(ErrorCode::out_of_domain, "window exceeds assigned range");
    return detail::window_composition_derivative(a, grid, i, j, false);
}

// ---------------------------------------------------------------------------
// Structured chain-rule expansion (orders 2..4)
// ---------------------------------------------------------------------------

struct ChainRuleExpansion {
    std::size_t window_start = 0;
    int order = 2;
    std::vector<double> R;  // R_q, 1-based in q (R[0] <-> q = 1)
    struct Extra {
        double coefficient = 1.0;
        // (node offset q in 0..N-1, derivative order s, power); orders >= 2 only
        std::vector<std::array<int, 3>> higher_factors;
        std::vector<std::array<int, 2>> first_order_powers;  // (node offset, power)
        double B = 1.0;      // product of the higher-derivative values
        double value = 0.0;  // coefficient * all factor values
    };
    std::vector<Extra> extras;
    double main_sum = 0.0;
    double extras_sum = 0.0;
    double total = 0.0;
};

namespace detail {

// Symbolic term of d^j/dx^j [g^N](x): map (node offset, derivative order) ->
// power, with an integer coefficient; differentiating a factor (q, s) gives
// (q, s+1) times the first derivatives at all earlier nodes.
using ChainTermKey = std::vector<std::array<int, 3>>;  // sorted (q, s, power)

inline ChainTermKey differentiate_factor(const std::map<std::pair<int, int>, int>& term, int q,
                                         int s) {
    std::map<std::pair<int, int>, int> next(term);
    if (--next[{q, s}] == 0) next.erase({q, s});
    ++next[{q, s + 1}];
    for (int u = 0; u < q; ++u) ++next[{u, 1}];
    ChainTermKey key;
    for (const auto& [fs, p] : next) key.push_back({fs.first, fs.second, p});
    return key;
}

}  // namespace detail

// Explicit enumeration of the window expansion for j in {2,3,4} and small N:
// repeated symbolic differentiation of the N-fold composition product, with
// terms combined canonically.  Main terms carry a single order-j factor; the
// remaining terms are the extras, each holding 2..j higher-order factors.
inline ChainRuleExpansion expand_chain_rule(const DerivativeAssignment& a,
                                            const GridSequence& grid, std::size_t i, int j) {
    if (j < 2 || j > std::min(a.k + 1, 4))
        raise(ErrorCode::order_too_high,
              "structured expansion covers orders 2..min(k+1, 4)");
    if (a.N > 32)
        raise(ErrorCode::precondition_violated,
              "structured expansion is enumerated only for N <= 32");
    if (i + static_cast<std::size_t>(a.N) > a.node_count())
        raise(ErrorCode::out_of_domain, "window exceeds assigned range");

    using Term = std::map<std::pair<int, int>, int>;  // (q, s) -> power
    std::map<detail::ChainTermKey, long long> terms;
    {
        detail::ChainTermKey first;
        for (int q = 0; q < a.N; ++q) first.push_back({q, 1, 1});
        terms[first] = 1;
    }
    for (int round = 1; round < j; ++round) {
        std::map<detail::ChainTermKey, long long> next;
        for (const auto& [key, coef] : terms) {
            Term term;
            for (const auto& f : key) term[{f[0], f[1]}] = f[2];
            for (const auto& f : key) {
                const auto nk = detail::differentiate_factor(term, f[0], f[1]);
                next[nk] += coef * f[2];
            }
        }
        terms = std::move(next);
    }

    ChainRuleExpansion out;
    out.window_start = i;
    out.order = j;
    out.R.assign(static_cast<std::size_t>(a.N), 0.0);
    auto deriv_value = [&](int q, int s) {
        return a.deriv(s, i + static_cast<std::size_t>(q));
    };
    for (const auto& [key, coef] : terms) {
        int top_q = -1;
        bool is_main = false;
        for (const auto& f : key)
            if (f[1] == j && f[2] == 1) {
                is_main = true;
                top_q = f[0];
            }
        double value = static_cast<double>(coef);
        for (const auto& f : key)
            value *= std::pow(deriv_value(f[0], f[1]), f[2]);
        if (is_main) {
            // R_q = coefficient of g^(j)(z_{i+q}): the product of the other factors
            double weight = static_cast<double>(coef);
            for (const auto& f : key)
                if (!(f[1] == j && f[0] == top_q))
                    weight *= std::pow(deriv_value(f[0], f[1]), f[2]);
            out.R[static_cast<std::size_t>(top_q)] = weight;
            out.main_sum += value;
        } else {
            ChainRuleExpansion::Extra e;
            e.coefficient = static_cast<double>(coef);
            e.B = 1.0;
            for (const auto& f : key) {
                if (f[1] >= 2) {
                    e.higher_factors.push_back(f);
                    e.B *= std::pow(deriv_value(f[0], f[1]), f[2]);
                } else {
                    e.first_order_powers.push_back({f[0], f[2]});
                }
            }
            e.value = value;
            out.extras.push_back(std::move(e));
            out.extras_sum += value;
        }
    }
    out.total = out.main_sum + out.extras_sum;
    return out;
}

// ---------------------------------------------------------------------------
// assign_derivatives
// ---------------------------------------------------------------------------

// targets[j][i] = f^(j)(z_i) for j = 0..k+1 over the grid nodes.
inline DerivativeAssignment assign_derivatives(const GridSequence& grid,
                                               const FiniteDifferenceTable& table,
                                               const std::vector<std::vector<double>>& targets,
                                               int k, double r,
                                               const Config& cfg = default_config(),
                                               double eps_override = -1.0) {
    if (k < 1) raise(ErrorCode::precondition_violated, "order k must be >= 1");
    const std::size_t nodes = grid.node_count();
    if (table.rows.size() < 2 || table.rows[0].size() != nodes)
        raise(ErrorCode::dimension_mismatch, "table inconsistent with grid");
    if (targets.size() < static_cast<std::size_t>(k) + 1)
        raise(ErrorCode::dimension_mismatch, "need target derivatives through order k");
    for (const auto& row : targets)
        if (row.size() < nodes)
            raise(ErrorCode::dimension_mismatch, "target row shorter than the grid");

    DerivativeAssignment a;
    a.k = k;
    a.N = grid.N;
    a.eps_N = (eps_override > 0.0) ? eps_override
                                   : 1.0 / (static_cast<double>(grid.N) * grid.N);
    a.derivs.assign(static_cast<std::size_t>(k) + 2, {});

    // --- g': case rule on the first finite-difference row -------------------
    const std::vector<double>& row1 = table.rows[1];
    std::vector<double> g1 = first_derivative_rule(row1, a.eps_N, &a.signed_eps);
    g1.push_back(row1.back());          // last node reuses the last estimate
    a.signed_eps.push_back(0.0);
    a.derivs[1] = g1;

    // quasi-monotone degrees: raw row and assigned windows
    a.l_table = quasi_monotone_degree(row1).degree;
    {
        int worst = 1;
        const std::size_t W = nodes >= static_cast<std::size_t>(grid.N) + 1
                                  ? nodes - static_cast<std::size_t>(grid.N)
                                  : 0;
        for (std::size_t w = 0; w <= W; ++w) {
            std::vector<double> win(g1.begin() + static_cast<std::ptrdiff_t>(w),
                                    g1.begin() + static_cast<std::ptrdiff_t>(w) +
                                        std::min<std::ptrdiff_t>(grid.N + 1,
                                                                 static_cast<std::ptrdiff_t>(nodes - w)));
            if (win.size() < 2) break;
            worst = std::max(worst, quasi_monotone_degree(win).degree);
        }
        a.l = worst;
    }

    // --- budget constants ----------------------------------------------------
    double disp = 0.0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
        for (std::size_t i = 0; i < nodes; ++i) {
            const double idv = (j == 0) ? grid.z[i] : (j == 1 ? 1.0 : 0.0);
            disp = std::max(disp, std::abs(targets[j][i] - idv));
        }
    }
    a.C = 2.0 + disp;

    double K = 1.0;
    const double Nd = static_cast<double>(grid.N);
    for (std::size_t i = 0; i < row1.size(); ++i)
        K = std::max(K, Nd * std::abs(row1[i] - 1.0));
    for (std::size_t j = 2; j < table.rows.size(); ++j)
        for (double v : table.rows[j]) K = std::max(K, Nd * std::abs(v));

    // --- higher orders through the choice solver ----------------------------
    for (int j = 2; j <= k; ++j) {
        const std::size_t avail = table.row_length(j);  // solver assigns this many nodes
        const std::size_t length = std::min(avail, nodes);
        if (length < static_cast<std::size_t>(grid.N))
            raise(ErrorCode::solver_infeasible, "grid too short for the window width");
        a.derivs[static_cast<std::size_t>(j)].assign(nodes, 0.0);

        ChoiceProblem prob;
        prob.N = grid.N;
        prob.length = static_cast<int>(length);
        prob.r = 0.5 * r;
        const std::size_t W = prob.window_count();
        double dmax = 1.0, dmin = 1.0, amax = 0.0, dvar = 0.0, avar = 0.0;
        std::vector<double> prefix(static_cast<std::size_t>(grid.N) + 1, 1.0);
        for (std::size_t w = 0; w < W; ++w) {
            std::vector<double> row(static_cast<std::size_t>(grid.N));
            // R_q = (g'(z_w) ... g'(z_{w+q-2}))^j * g'(z_{w+q}) ... g'(z_{w+N-1})
            for (int t = 1; t <= grid.N; ++t)
                prefix[static_cast<std::size_t>(t)] =
                    prefix[static_cast<std::size_t>(t - 1)] *
                    a.derivs[1][w + static_cast<std::size_t>(t - 1)];
            for (int q = 1; q <= grid.N; ++q) {
                const double pre = prefix[static_cast<std::size_t>(q - 1)];
                const double post = prefix[static_cast<std::size_t>(grid.N)] /
                                    prefix[static_cast<std::size_t>(q)];
                row[static_cast<std::size_t>(q - 1)] = std::pow(pre, j) * post;
            }
            const double extras = detail::window_composition_derivative(a, grid, w, j, true);
            const double target = targets[static_cast<std::size_t>(j)][w] - extras;
            for (double v : row) {
                dmax = std::max(dmax, v);
                dmin = std::min(dmin, v);
            }
            amax = std::max(amax, std::abs(target));
            if (w > 0) {
                for (int q = 0; q < grid.N; ++q)
                    dvar = std::max(dvar, std::abs(row[static_cast<std::size_t>(q)] -
                                                   prob.d.back()[static_cast<std::size_t>(q)]));
                avar = std::max(avar, std::abs(target - prob.a.back()));
            }
            prob.d.push_back(std::move(row));
            prob.a.push_back(target);
        }
        if (!(dmin > 0.0))
            raise(ErrorCode::solver_infeasible, "window weights lost positivity");
        prob.M = 1.25 * std::max({dmax, 1.0 / dmin, amax, Nd * dvar, Nd * avar}) + 1.0;

        const ChoiceSolution sol = solve_choice(prob, ChoiceMode::adaptive, cfg);
        for (std::size_t i = 0; i < length; ++i)
            a.derivs[static_cast<std::size_t>(j)][i] = sol.x[i];
        for (std::size_t i = length; i < nodes; ++i)
            a.derivs[static_cast<std::size_t>(j)][i] = sol.x[length - 1];

        // (c-v): recompute the window residuals through the full expansion
        double worst = 0.0;
        for (std::size_t w = 0; w < W; ++w)
            worst = std::max(worst,
                             std::abs(chain_rule_window(a, grid, w, j) -
                                      targets[static_cast<std::size_t>(j)][w]));
        a.choice_residuals.push_back(worst);
        if (!(worst < 0.5 * r))
            raise(ErrorCode::solver_infeasible,
                  "window residual " + std::to_string(worst) + " at order " +
                      std::to_string(j));

        // Ratio bounds vs. the finite-difference row.  Both sequences cross
        // zero (at slightly different indices), so entries negligibly small
        // relative to their own row count as vanishing denominators rather
        // than blowing up the budget constant.
        {
            double den_scale = 0.0, num_scale = 0.0;
            for (std::size_t i = 0; i < std::min(avail, length); ++i) {
                den_scale = std::max(den_scale, std::abs(table.rows[static_cast<std::size_t>(j)][i]));
                num_scale = std::max(num_scale, std::abs(a.derivs[static_cast<std::size_t>(j)][i]));
            }
            for (std::size_t i = 0; i < std::min(avail, length); ++i) {
                const double den = table.rows[static_cast<std::size_t>(j)][i];
                const double num = a.derivs[static_cast<std::size_t>(j)][i];
                if (std::abs(den) <= 1e-7 * den_scale || std::abs(num) <= 1e-7 * num_scale) {
                    ++a.ratio_zero_count;
                    continue;
                }
                const double ratio = std::abs(num / den);
                K = std::max({K, ratio, 1.0 / ratio});
            }
        }
    }

    // Top order k+1: carry the finite-difference estimates, clamped per node.
    // This row is only pinned within the budget-factor band of the table
    // value, so magnitude is negotiable; what is not negotiable is numerical
    // sanity of the Hermite pieces built on it.  The table's top row divides
    // slope jitter by powers of microscopic gaps, and letting those
    // estimates (1e9 and far beyond) reach the node jets would push wild
    // derivative data into pieces whose interiors the verifier samples,
    // besides swamping the derivative-continuity tolerance with roundoff of
    // order macheps * |d| at piece ends.
    //
    //  * For k >= 2 every node is capped at 1/N.  The budget constant
    //    already satisfies K >= N*|row|, so the admissible band around any
    //    table entry reaches down to |row|/K <= 1/N and the uniform cap
    //    stays inside it; the contribution of this row to the sampled
    //    orders of any adjacent piece of width h is then below h^(k-1)/N, a
    //    vanishing share of the radius even after N-fold composition.
    //
    //  * For k = 1 the derivative over an adjacent piece of width h moves by
    //    about |d| h, so the cap keeps that contribution below 1/4 over the
    //    widest adjacent piece (including the closing pieces at 0 and 1),
    //    with a flat ceiling for roundoff sanity; both limbs sit far above
    //    1/N, so moderate genuine curvature data passes through untouched
    //    while staying inside the same band.
    {
        const std::size_t j = static_cast<std::size_t>(k) + 1;
        a.derivs[j].assign(nodes, 0.0);
        const std::size_t avail = (j < table.rows.size()) ? table.rows[j].size() : 0;
        for (std::size_t i = 0; i < nodes; ++i) {
            const double d = (avail == 0) ? 0.0 : table.rows[j][std::min(i, avail - 1)];
            double cap = 1.0 / Nd;
            if (k == 1) {
                const double left = (i == 0) ? grid.z[0] : grid.z[i] - grid.z[i - 1];
                const double right = (i + 1 == nodes) ? 1.0 - grid.z[i] : grid.z[i + 1] - grid.z[i];
                cap = std::min(0.25 / std::max(left, right), 3e4);
            }
            a.derivs[j][i] = std::clamp(d, -cap, cap);
        }
        // Fold this row into the ratio-bound budget alongside orders 2..k,
        // with the same vanishing-value floor.
        double den_scale = 0.0, num_scale = 0.0;
        for (std::size_t i = 0; i < std::min(avail, nodes); ++i) {
            den_scale = std::max(den_scale, std::abs(table.rows[j][i]));
            num_scale = std::max(num_scale, std::abs(a.derivs[j][i]));
        }
        for (std::size_t i = 0; i < std::min(avail, nodes); ++i) {
            const double den = table.rows[j][i];
            const double num = a.derivs[j][i];
            if (std::abs(den) <= 1e-7 * den_scale || std::abs(num) <= 1e-7 * num_scale) {
                ++a.ratio_zero_count;
                continue;
            }
            const double ratio = std::abs(num / den);
            K = std::max({K, ratio, 1.0 / ratio});
        }
    }

    // Strict headroom over every max that built the constant, so the bounds
    // it certifies hold with strict inequality at their own argmax.
    a.K = 1.0001 * K;
    return a;
}

// ---------------------------------------------------------------------------
// Extension to a diffeomorphism
// ---------------------------------------------------------------------------

// Two-point Hermite pieces of degree 2k+3 through the assigned node jets,
// closed off by end pieces matching the identity class at 0 and 1.  When a
// grid piece fails the monotone-derivative check, the top-order node data
// (order k+1, the only row not pinned by the window residual budget) is
// halved at the offending nodes; `assignment` is updated so callers keep a
// consistent view.
//
// For k = 1 (or when no target map is supplied) the end pieces interpolate
// exact identity jets.  For k >= 2 the sampled interior orders of the N-fold
// composite must track the target's own derivative profile wherever orbits
// linger — a slow orbit multiplies any pointwise deviation of g^(j) from
// f^(j)/N by roughly N — so the closing regions instead carry the
// displacement of the target at flow scale: jets of x + (f(x) - x)/N.  That
// function is a polynomial of the piece degree on every piece of f, so with
// knots at the breakpoints of f the closing pieces reproduce it exactly, it
// meets the grid because f(z) - z is exactly N times the first block
// increment at the anchors, and it inherits identity contact through order k
// at 0 and 1 from the flat bump factor of the displacement itself (order
// k+1 carries (f - id)^(k+1)/N there, matching the class of the target).
inline PiecewisePolyDiffeo extend_to_diffeo(const GridSequence& grid,
                                            DerivativeAssignment& assignment, double K,
                                            const Config& cfg = default_config(),
                                            const PiecewisePolyDiffeo* flow = nullptr) {
    (void)K;
    const std::size_t nodes = grid.node_count();
    if (assignment.node_count() != nodes)
        raise(ErrorCode::dimension_mismatch, "assignment inconsistent with grid");
    if (!(grid.z.front() > 0.0) || !(grid.z[nodes - 1] < 1.0))
        raise(ErrorCode::precondition_violated, "grid must be interior to (0,1)");

    const int k = assignment.k;
    const std::size_t width = static_cast<std::size_t>(k) + 2;  // orders 0..k+1
    const double Nd = static_cast<double>(grid.N);
    const bool flow_ends = (flow != nullptr) && k >= 2;

    // Jet of x + (flow(x) - x)/N at y, orders 0..k+1.
    const auto flow_row = [&](double y) {
        const auto fj = flow->jet_at(y, k + 1).to_derivatives();
        std::vector<double> row(width, 0.0);
        row[0] = y + (fj[0] - y) / Nd;
        row[1] = 1.0 + (fj[1] - 1.0) / Nd;
        for (int j = 2; j <= k + 1; ++j)
            row[static_cast<std::size_t>(j)] = fj[static_cast<std::size_t>(j)] / Nd;
        return row;
    };

    // Node jets: image z_{i+1} plus the assigned derivatives per grid node.
    std::vector<std::vector<double>> node_row(nodes, std::vector<double>(width, 0.0));
    for (std::size_t i = 0; i < nodes; ++i) {
        node_row[i][0] = grid.z[i + 1];
        for (int j = 1; j <= k + 1; ++j)
            node_row[i][static_cast<std::size_t>(j)] =
                assignment.derivs[static_cast<std::size_t>(j)][i];
    }
    if (flow_ends) {
        // The boundary nodes border the wide closing pieces, where top-order
        // noise inherited from the difference table would spread into sampled
        // territory; pin their order k+1 to the flow value (inside the same
        // budget band — see the assignment's cap rationale).
        node_row[0][width - 1] = flow->jet_at(grid.z[0], k + 1)
                                     .to_derivatives()[width - 1] / Nd;
        node_row[nodes - 1][width - 1] = flow->jet_at(grid.z[nodes - 1], k + 1)
                                             .to_derivatives()[width - 1] / Nd;
    }

    // Closing knots above the grid: the first piece spans a wide margin (the
    // node data meets the flow profile only to within the grid's rounding
    // noise, and a mismatch s in the slope data costs about s / width^2 in
    // the interior curvature orders, N-fold amplified), then knots at the
    // breakpoints of the target make every further piece an exact flow
    // track out to 1.
    std::vector<double> tail_x;
    if (flow_ends) {
        const double z_top = grid.z[nodes - 1];
        const double margin = 0.1;
        for (double b : flow->breakpoints())
            if (b >= z_top + margin && b < 1.0 - 1e-9) tail_x.push_back(b);
    }

    // Interior knots inserted per grid piece.  A piece whose mean slope m sits
    // a fraction s = (m - a)/(b - a) from its left end slope can only carry a
    // monotone polynomial derivative when s is well inside (0, 1); and even
    // then the single Hermite piece is fully pinned by the shared node jets,
    // which can demand incompatible shapes on the two sides of a node.  Two
    // interior knots resolve this: edge transition pieces of width w and a
    // linear middle at slope lambda chosen so that every sub-piece's mean is
    // the average of its end slopes (the most monotone-friendly shape).
    struct Knot {
        double x;
        std::vector<double> row;
    };
    std::vector<std::vector<Knot>> piece_knots(nodes);

    std::vector<double> xs;
    std::vector<std::vector<double>> data;
    const auto assemble = [&] {
        xs.clear();
        data.clear();
        std::vector<double> id_row(width, 0.0);
        id_row[1] = 1.0;
        xs.push_back(0.0);
        data.push_back(flow_ends ? flow_row(0.0) : id_row);
        for (std::size_t i = 0; i < nodes; ++i) {
            xs.push_back(grid.z[i]);
            data.push_back(node_row[i]);
            for (const Knot& kn : piece_knots[i]) {
                xs.push_back(kn.x);
                data.push_back(kn.row);
            }
        }
        for (double b : tail_x) {
            xs.push_back(b);
            data.push_back(flow_row(b));
        }
        id_row[0] = 1.0;
        xs.push_back(1.0);
        data.push_back(flow_ends ? flow_row(1.0) : id_row);
    };

    const int samples = std::max(4, cfg.piece_check_samples);
    for (int round = 0; round < 24; ++round) {
        assemble();
        PiecewisePolyDiffeo g = [&] {
            try {
                return PiecewisePolyDiffeo::from_hermite_data(xs, data, k + 1, cfg);
            } catch (const Error& e) {
                raise(ErrorCode::monotone_extension_failed,
                      std::string("node data does not assemble into an increasing map: ") +
                          e.what());
            }
        }();

        // monotone g' on every grid subinterval (end pieces exempt)
        std::vector<std::size_t> bad;
        for (std::size_t p = 0; p + 1 < nodes; ++p) {
            const double lo = grid.z[p], hi = grid.z[p + 1];
            const double span = std::abs(node_row[p + 1][1] - node_row[p][1]);
            // The node data only determines monotonicity down to the local
            // nudge scale: where consecutive finite differences agree to
            // within the nudge, both end slopes can land on the same side of
            // the piece mean and the interior must cross back.  Below that
            // sits the resolution of the slope data itself — ratios of
            // nearby rounded positions carry relative noise of order
            // macheps * |z| / h, and wiggles at that scale are artifacts of
            // the data, not of the interpolant.
            const double local_eps = std::max(std::abs(assignment.signed_eps[p]),
                                              std::abs(assignment.signed_eps[p + 1]));
            const double data_noise = 64.0 * std::numeric_limits<double>::epsilon() *
                                      std::max(std::abs(lo), std::abs(hi)) / (hi - lo);
            const double slack = 1e-12 + 2.0 * local_eps + 1e-6 * span + data_noise;
            double up = 0.0, down = 0.0, prev = g.evaluate(lo, 1);
            for (int s = 1; s <= samples; ++s) {
                const double x = lo + (hi - lo) * s / samples;
                const double d1 = g.evaluate(x, 1);
                if (d1 > prev) up = std::max(up, d1 - prev);
                if (d1 < prev) down = std::max(down, prev - d1);
                prev = d1;
            }
            if (up > slack && down > slack) bad.push_back(p);
        }
        if (bad.empty()) {
            for (std::size_t i = 0; i < nodes; ++i)
                assignment.derivs[static_cast<std::size_t>(k) + 1][i] =
                    node_row[i][width - 1];
            return g;
        }
        for (std::size_t p : bad) {
            if (piece_knots[p].empty()) {
                const double lo = grid.z[p], hi = grid.z[p + 1], h = hi - lo;
                const double a = node_row[p][1], b = node_row[p + 1][1];
                const double m = (node_row[p + 1][0] - node_row[p][0]) / h;
                const double range = b - a;
                const double s_star = range != 0.0 ? (m - a) / range : -1.0;
                if (s_star > 1e-4 && s_star < 1.0 - 1e-4) {
                    const double w = h * std::min({0.125, s_star, 1.0 - s_star});
                    const double lambda = (m * h - 0.5 * (a + b) * w) / (h - w);
                    std::vector<double> left(width, 0.0), right(width, 0.0);
                    left[0] = node_row[p][0] + 0.5 * (a + lambda) * w;
                    left[1] = lambda;
                    right[0] = left[0] + lambda * (h - 2.0 * w);
                    right[1] = lambda;
                    piece_knots[p] = {Knot{lo + w, std::move(left)},
                                      Knot{hi - w, std::move(right)}};
                    continue;
                }
            }
            // fall back to draining the top-order data at the piece ends
            node_row[p][width - 1] *= 0.5;
            node_row[p + 1][width - 1] *= 0.5;
        }
    }
    raise(ErrorCode::monotone_extension_failed,
          "derivative stays non-monotone after knot insertion and top-order damping");
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

struct RootReport {
    double c0_residual = 0.0;        // (1) sup |g^N - f|
    double low_order_norm = 0.0;     // (2) orders <= 1 of g vs identity
    double interior_sup = 0.0;       // (3) max over 2 <= s <= k of sup |g^(s)|
    double ck_residual = 0.0;        // (4) orders <= k of g^N vs f
    double grid_residual = 0.0;      // max |g^N(b) - f(b)| over grid-exact breakpoints
    std::size_t grid_points = 0;
    bool pass1 = false, pass2 = false, pass3 = false, pass4 = false, grid_ok = false;
    bool pass = false;
};

inline constexpr double kGridCommutationTol = 1e-9;

inline RootReport verify_root(const PiecewisePolyDiffeo& f, const PiecewisePolyDiffeo& g, int N,
                              int k, double r, const Config& cfg = default_config()) {
    if (N < 1) raise(ErrorCode::precondition_violated, "iteration count must be >= 1");
    if (k < 1) raise(ErrorCode::precondition_violated, "order k must be >= 1");
    RootReport rep;

    const int kg = std::min(k, g.smoothness_order());
    const CkNormReport id_rep = ck_distance_report(g, PiecewisePolyDiffeo::identity(), kg, cfg);
    rep.low_order_norm = std::max(id_rep.per_order[0],
                                  id_rep.per_order.size() > 1 ? id_rep.per_order[1] : 0.0);
    for (int s = 2; s <= kg; ++s)
        rep.interior_sup = std::max(rep.interior_sup, id_rep.per_order[static_cast<std::size_t>(s)]);

    // orders 0..k of g^N - f, sampled with exact orbit jets
    const int korder = std::min({k, g.smoothness_order(), f.smoothness_order()});
    std::vector<double> samples = detail::norm_sample_grid(f, g, cfg);
    for (double x : samples) {
        const Jet jn = iterate_jet(g, x, N, korder);
        const Jet jf = f.jet_at(x, korder);
        const auto dn = jn.to_derivatives();
        const auto df = jf.to_derivatives();
        rep.c0_residual = std::max(rep.c0_residual, std::abs(dn[0] - df[0]));
        for (int s = 0; s <= korder; ++s)
            rep.ck_residual = std::max(rep.ck_residual,
                                       std::abs(dn[static_cast<std::size_t>(s)] -
                                                df[static_cast<std::size_t>(s)]));
    }

    // Grid commutation over interior breakpoints whose whole orbit stays on
    // breakpoints.  Evaluating a piece at its own left end returns the stored
    // image exactly, so a node-to-node orbit is reproduced bit for bit and
    // membership can be tested exactly; the first step off the breakpoint
    // set (closing-region knots, exiting orbits) excludes the point.
    const auto& bps = g.breakpoints();
    if (bps.size() > 2) {
        for (std::size_t i = 1; i + 1 < bps.size(); ++i) {
            double v = bps[i];
            bool on_nodes = true;
            for (int t = 0; t < N; ++t) {
                if (t > 0 && !std::binary_search(bps.begin(), bps.end(), v)) {
                    on_nodes = false;
                    break;
                }
                v = g(v);
            }
            if (!on_nodes) continue;
            ++rep.grid_points;
            rep.grid_residual = std::max(rep.grid_residual, std::abs(v - f(bps[i])));
        }
    }

    rep.pass1 = rep.c0_residual < r;
    rep.pass2 = rep.low_order_norm < r;
    rep.pass3 = (k < 2) || (rep.interior_sup < r);
    rep.pass4 = rep.ck_residual < r;
    rep.grid_ok = rep.grid_residual < kGridCommutationTol;
    rep.pass = rep.pass1 && rep.pass2 && rep.pass3 && rep.pass4 && rep.grid_ok;
    return rep;
}

// ---------------------------------------------------------------------------
// approximate_root
// ---------------------------------------------------------------------------

struct RootResult {
    PiecewisePolyDiffeo g;
    PiecewisePolyDiffeo target;  // the flat polynomial model the grid was built on
    int N = 0;
    int n = 0;
    double K = 1.0;
    double eps_N = 0.0;
    RootReport report;
};

namespace detail {

inline RootResult approximate_root_ascending(const PiecewisePolyDiffeo& f, int k, double r,
                                             const Config& cfg) {
    const PiecewisePolyDiffeo target = flatten_to_polynomial(f, k, r, cfg);
    // Budget split: the model is within r/4 of f, so verify against the model
    // at 0.7 r; the triangle inequality then gives < r against f itself.
    bool replaced = target.breakpoints() != f.breakpoints() ||
                    target.pieces().size() != f.pieces().size();
    if (!replaced)
        for (std::size_t i = 0; i < target.pieces().size(); ++i)
            if (target.pieces()[i].coeffs() != f.pieces()[i].coeffs()) replaced = true;
    const double budget = replaced ? 0.7 * r : r;

    const AnchorSet anchors = select_anchors(target, r, k, cfg);

    std::string last_failure = "no grid order attempted";
    for (int N = std::max(2, cfg.root_N0); N <= cfg.root_N_cap; N *= 2) {
        GridSequence grid;
        try {
            grid = build_grid(target, anchors, N, cfg);
        } catch (const Error& e) {
            last_failure = e.what();
            continue;
        }
        FiniteDifferenceTable table = finite_difference_table(grid, k);
        std::vector<std::vector<double>> targets(static_cast<std::size_t>(k) + 2);
        for (int j = 0; j <= k + 1; ++j) {
            auto& row = targets[static_cast<std::size_t>(j)];
            row.resize(grid.node_count());
            for (std::size_t i = 0; i < grid.node_count(); ++i)
                row[i] = target.evaluate(grid.z[i], j);
        }

        // The perturbation must stay consistent with the local grid scale:
        // prescribing a slope that differs from the piece secant by more than
        // the curvature can absorb over one gap makes the Hermite extension
        // non-monotone.  Any decreasing-to-zero choice is admissible, so cap
        // the default 1/N^2 by a fraction of the smallest gap.
        double min_gap = 1.0;
        for (std::size_t i = 0; i + 1 < grid.z.size(); ++i)
            min_gap = std::min(min_gap, grid.z[i + 1] - grid.z[i]);
        double eps = std::min(1.0 / (static_cast<double>(N) * N), 0.03 * min_gap);
        for (int shrink = 0; shrink < 4; ++shrink) {
            try {
                DerivativeAssignment asg =
                    assign_derivatives(grid, table, targets, k, r, cfg, eps);
                PiecewisePolyDiffeo g = extend_to_diffeo(grid, asg, asg.K, cfg, &target);
                RootReport rep = verify_root(target, g, N, k, budget, cfg);
                if (rep.pass) {
                    RootResult out{std::move(g), target, N, anchors.n, asg.K, asg.eps_N, rep};
                    // re-evaluate the reported inequalities at the caller radius
                    out.report.pass1 = out.report.c0_residual < r;
                    out.report.pass2 = out.report.low_order_norm < r;
                    out.report.pass3 = (k < 2) || (out.report.interior_sup < r);
                    out.report.pass4 = out.report.ck_residual < r;
                    out.report.pass = out.report.pass1 && out.report.pass2 &&
                                      out.report.pass3 && out.report.pass4 &&
                                      out.report.grid_ok;
                    return out;
                }
                last_failure = "residuals above budget at N = " + std::to_string(N);
                break;  // residual failure: enlarge N
            } catch (const Error& e) {
                if (e.code() == ErrorCode::monotone_extension_failed && shrink + 1 < 4) {
                    eps *= 0.25;
                    continue;
                }
                if (e.code() == ErrorCode::solver_infeasible ||
                    e.code() == ErrorCode::monotone_extension_failed) {
                    last_failure = e.what();
                    break;  // enlarge N
                }
                throw;
            }
        }
    }
    raise(ErrorCode::exhausted,
          "no verified root below the grid-order cap (last failure: " + last_failure + ")");
}

}  // namespace detail

inline RootResult approximate_root(const PiecewisePolyDiffeo& f, int k, double r,
                                   const Config& cfg = default_config()) {
    if (r <= 0.0) raise(ErrorCode::precondition_violated, "radius must be positive");
    const AnalysisReport an = analyze(f, std::min(k, f.smoothness_order()), cfg);
    if (an.direction < 0 && an.fixed_point_free) {
        // descending displacement: root the inverse and invert back
        const PiecewisePolyDiffeo fi = invert(f, cfg);
        RootResult asc = detail::approximate_root_ascending(fi, k, r, cfg);
        RootResult out;
        out.g = invert(asc.g, cfg);
        out.target = invert(asc.target, cfg);
        out.N = asc.N;
        out.n = asc.n;
        out.K = asc.K;
        out.eps_N = asc.eps_N;
        out.report = verify_root(out.target, out.g, out.N, k, r, cfg);
        return out;
    }
    return detail::approximate_root_ascending(f, k, r, cfg);
}

}  // namespace ckroot
