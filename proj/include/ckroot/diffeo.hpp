#pragma once

// Piecewise-polynomial orientation-preserving diffeomorphisms of [0,1].
// Each piece stores ascending coefficients in the local coordinate
// u = x - t_i of its subinterval [t_i, t_{i+1}].  Construction validates the
// diffeomorphism invariants: exact endpoint fixing, strictly increasing
// values, positive derivative, and derivative continuity through the
// declared smoothness order at interior breakpoints.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ckroot/config.hpp"
#include "ckroot/errors.hpp"
#include "ckroot/poly.hpp"

namespace ckroot {

class PiecewisePolyDiffeo {
public:
    // Declared smoothness of single-piece (polynomial) maps: every derivative
    // is globally continuous, capped by the library-wide order bound.
    static constexpr int kPolynomialSmooth = 64;

    PiecewisePolyDiffeo() { *this = identity(); }

    PiecewisePolyDiffeo(std::vector<double> breakpoints, std::vector<Poly> pieces,
                        int smoothness_order, const Config& cfg = default_config())
        : breaks_(std::move(breakpoints)), pieces_(std::move(pieces)), smooth_(smoothness_order) {
        normalize_and_validate(cfg);
    }

    static PiecewisePolyDiffeo identity() {
        PiecewisePolyDiffeo f(Tag{});
        f.breaks_ = {0.0, 1.0};
        f.pieces_ = {Poly({0.0, 1.0})};
        f.smooth_ = kPolynomialSmooth;
        return f;
    }

    // x + c * x^(k+1) * (1-x)^(k+1): fixed-point free for c != 0, flat to
    // order k at both endpoints.
    static PiecewisePolyDiffeo flat_bump(double c, int k, const Config& cfg = default_config()) {
        if (k < 1) raise(ErrorCode::precondition_violated, "flat_bump needs k >= 1");
        Poly x({0.0, 1.0});
        Poly one_minus_x({1.0, -1.0});
        Poly bump = Poly::constant(1.0);
        for (int i = 0; i < k + 1; ++i) bump = bump * x * one_minus_x;
        Poly p = x + bump * c;
        return PiecewisePolyDiffeo({0.0, 1.0}, {p}, kPolynomialSmooth, cfg);
    }

    static PiecewisePolyDiffeo from_polynomial(std::vector<double> coeffs,
                                               const Config& cfg = default_config()) {
        return PiecewisePolyDiffeo({0.0, 1.0}, {Poly(std::move(coeffs))}, kPolynomialSmooth, cfg);
    }

    // Hermite assembly: nodes[0]=0, nodes.back()=1, node_derivs[i] holds the
    // value and derivatives (orders 0..m) prescribed at nodes[i]; each piece
    // becomes the unique degree-(2m+1) two-point Hermite polynomial.
    static PiecewisePolyDiffeo from_hermite_data(const std::vector<double>& nodes,
                                                 const std::vector<std::vector<double>>& node_derivs,
                                                 int smoothness_order,
                                                 const Config& cfg = default_config()) {
        if (nodes.size() < 2 || nodes.size() != node_derivs.size())
            raise(ErrorCode::dimension_mismatch, "hermite node/data size mismatch");
        std::vector<Poly> pieces;
        pieces.reserve(nodes.size() - 1);
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            const double h = nodes[i + 1] - nodes[i];
            pieces.push_back(hermite_two_point(h, node_derivs[i], node_derivs[i + 1]));
        }
        return PiecewisePolyDiffeo(nodes, std::move(pieces), smoothness_order, cfg);
    }

    const std::vector<double>& breakpoints() const { return breaks_; }
    const std::vector<Poly>& pieces() const { return pieces_; }
    int smoothness_order() const { return smooth_; }
    int piece_count() const { return static_cast<int>(pieces_.size()); }
    bool reapproximated() const { return reapproximated_; }
    void mark_reapproximated() { reapproximated_ = true; }

    int max_piece_degree() const {
        int d = 0;
        for (const Poly& p : pieces_) d = std::max(d, p.degree());
        return d;
    }

    bool is_identity() const {
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            const auto& c = pieces_[i].coeffs();
            if (c[0] != breaks_[i]) return false;
            if (c.size() < 2 || c[1] != 1.0) return false;
            for (std::size_t m = 2; m < c.size(); ++m)
                if (c[m] != 0.0) return false;
        }
        return true;
    }

    std::size_t piece_index(double x) const {
        if (x <= breaks_.front()) return 0;
        if (x >= breaks_.back()) return pieces_.size() - 1;
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
        return static_cast<std::size_t>(it - breaks_.begin()) - 1;
    }

    double operator()(double x) const { return evaluate(x, 0); }

    double evaluate(double x, int j, const Config& cfg = default_config()) const {
        if (j < 0 || j > std::min(smooth_, cfg.max_derivative_order))
            raise(ErrorCode::order_too_high,
                  "derivative order " + std::to_string(j) + " exceeds smoothness " + std::to_string(smooth_));
        if (x < -1e-12 || x > 1.0 + 1e-12)
            raise(ErrorCode::out_of_domain, "argument " + std::to_string(x) + " outside [0,1]");
        x = std::clamp(x, 0.0, 1.0);
        const std::size_t i = piece_index(x);
        return pieces_[i].derivative_at(x - breaks_[i], j);
    }

    // Taylor jet of the map at x (right piece at breakpoints).
    Jet jet_at(double x, int order) const {
        x = std::clamp(x, 0.0, 1.0);
        const std::size_t i = piece_index(x);
        return Jet::of_poly(pieces_[i], x - breaks_[i], order);
    }

    // Largest interior violation of derivative continuity through `order`,
    // normalized by max(1, |value|).  Gaps below the evaluation-roundoff
    // resolution of the adjacent pieces do not count: computing an order-j
    // derivative at distance u into a piece carries an absolute error of
    // roughly macheps * sum_m |c_m| (m)_j u^(m-j), and on very narrow pieces
    // (widths near 1e-8 arise routinely around near-identity orbits) that
    // bound dwarfs any meaningful tolerance at higher orders.  Smoothness
    // here is numerical: agreement to within what evaluation can resolve.
    double continuity_gap(int order) const {
        const double u = std::numeric_limits<double>::epsilon();
        const auto roundoff = [u](const Poly& p, double t, int j) {
            const auto& c = p.coeffs();
            double bound = 0.0, fall = 1.0;
            for (int m = static_cast<int>(c.size()) - 1; m >= j; --m) {
                fall = 1.0;
                for (int q = 0; q < j; ++q) fall *= static_cast<double>(m - q);
                bound = bound * t + std::abs(c[static_cast<std::size_t>(m)]) * fall;
            }
            return 4.0 * u * bound;
        };
        double worst = 0.0;
        for (std::size_t i = 1; i < breaks_.size() - 1; ++i) {
            const double t = breaks_[i];
            const double h_left = t - breaks_[i - 1];
            for (int j = 0; j <= order; ++j) {
                const double left = pieces_[i - 1].derivative_at(h_left, j);
                const double right = pieces_[i].derivative_at(0.0, j);
                const double noise =
                    roundoff(pieces_[i - 1], h_left, j) + roundoff(pieces_[i], 0.0, j);
                const double scale = std::max(1.0, std::max(std::abs(left), std::abs(right)));
                worst = std::max(worst, (std::abs(left - right) - noise) / scale);
            }
        }
        return worst;
    }

private:
    struct Tag {};
    explicit PiecewisePolyDiffeo(Tag) {}

    void normalize_and_validate(const Config& cfg) {
        if (breaks_.size() < 2 || pieces_.size() + 1 != breaks_.size())
            raise(ErrorCode::invariant_violation, "breakpoint/piece count mismatch");
        if (breaks_.front() != 0.0 || breaks_.back() != 1.0)
            raise(ErrorCode::invariant_violation, "domain must be exactly [0,1]");
        for (std::size_t i = 1; i < breaks_.size(); ++i)
            if (!(breaks_[i] - breaks_[i - 1] > cfg.min_spacing))
                raise(ErrorCode::not_increasing, "breakpoints not increasing at index " + std::to_string(i));
        if (smooth_ < 0) raise(ErrorCode::invariant_violation, "negative smoothness order");

        // Snap endpoint values exactly: f(0) = 0, f(1) = 1.
        {
            auto c0 = pieces_.front().coeffs();
            if (std::abs(c0[0]) > 1e-9)
                raise(ErrorCode::invariant_violation, "f(0) != 0");
            c0[0] = 0.0;
            pieces_.front() = Poly(std::move(c0));

            const double h_last = 1.0 - breaks_[breaks_.size() - 2];
            const double v1 = pieces_.back()(h_last);
            if (std::abs(v1 - 1.0) > 1e-9)
                raise(ErrorCode::invariant_violation, "f(1) != 1");
            auto cl = pieces_.back().coeffs();
            cl[0] += 1.0 - v1;
            pieces_.back() = Poly(std::move(cl));
        }

        // Value monotonicity and derivative positivity on a per-piece sample.
        double prev = 0.0;
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            const double h = breaks_[i + 1] - breaks_[i];
            const int samples = std::max(cfg.piece_check_samples, pieces_[i].degree() + 2);
            for (int s = 0; s <= samples; ++s) {
                const double u = h * static_cast<double>(s) / static_cast<double>(samples);
                const double d = pieces_[i].derivative_at(u, 1);
                if (!(d > 0.0))
                    raise(ErrorCode::invariant_violation,
                          "nonpositive derivative near x = " + std::to_string(breaks_[i] + u));
                const double v = pieces_[i].derivative_at(u, 0);
                if (s > 0 && !(v >= prev - 1e-12))
                    raise(ErrorCode::not_increasing,
                          "values not increasing near x = " + std::to_string(breaks_[i] + u));
                prev = v;
            }
        }

        const int check_order = std::min(smooth_, max_piece_degree());
        if (pieces_.size() > 1 && continuity_gap(check_order) > cfg.continuity_tol)
            raise(ErrorCode::invariant_violation,
                  "derivative continuity gap exceeds tolerance at declared order");
    }

    std::vector<double> breaks_;
    std::vector<Poly> pieces_;
    int smooth_ = 0;
    bool reapproximated_ = false;
};

}  // namespace ckroot
