#pragma once

// Dense univariate polynomials, truncated Taylor jets, and two-point Hermite
// interpolation.  Polynomials are stored with ascending coefficients in a
// local coordinate chosen by the caller; jets carry Taylor coefficients
// f^(i)(x0)/i! and support the composition/reversion algebra needed to push
// derivative data through compositions of maps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ckroot/errors.hpp"

namespace ckroot {

class Poly {
public:
    Poly() : c_{0.0} {}
    explicit Poly(std::vector<double> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty()) c_.push_back(0.0);
    }

    static Poly constant(double a) { return Poly({a}); }
    static Poly linear(double a0, double a1) { return Poly({a0, a1}); }

    const std::vector<double>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }

    double operator()(double x) const {
        double r = 0.0;
        for (std::size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
        return r;
    }

    // j-th derivative evaluated at x, by Horner on the differentiated
    // coefficient sequence (falling factorials applied on the fly).
    double derivative_at(double x, int j) const {
        if (j < 0) raise(ErrorCode::order_too_high, "negative derivative order");
        if (j > degree()) return 0.0;
        double r = 0.0;
        for (int m = degree(); m >= j; --m) {
            double f = 1.0;
            for (int t = 0; t < j; ++t) f *= static_cast<double>(m - t);
            r = r * x + f * c_[static_cast<std::size_t>(m)];
        }
        return r;
    }

    Poly derivative(int j = 1) const {
        Poly p = *this;
        for (int t = 0; t < j; ++t) {
            if (p.c_.size() <= 1) return Poly::constant(0.0);
            std::vector<double> d(p.c_.size() - 1);
            for (std::size_t m = 1; m < p.c_.size(); ++m)
                d[m - 1] = p.c_[m] * static_cast<double>(m);
            p.c_ = std::move(d);
        }
        return p;
    }

    Poly operator+(const Poly& o) const {
        std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
        for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
        return Poly(std::move(r));
    }
    Poly operator-(const Poly& o) const {
        std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
        for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] -= o.c_[i];
        return Poly(std::move(r));
    }
    Poly operator*(const Poly& o) const {
        std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i)
            for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
        return Poly(std::move(r));
    }
    Poly operator*(double s) const {
        Poly p = *this;
        for (double& v : p.c_) v *= s;
        return p;
    }

    // p(inner(x)) by Horner in polynomial arithmetic.
    Poly compose(const Poly& inner) const {
        Poly r = Poly::constant(c_.back());
        for (std::size_t i = c_.size() - 1; i-- > 0;) {
            r = r * inner;
            r.c_[0] += c_[i];
        }
        return r;
    }

    // p(x + dx): in-place Taylor shift (synthetic Horner scheme).
    Poly shift_origin(double dx) const {
        Poly p = *this;
        const int n = p.degree();
        for (int j = 0; j < n; ++j)
            for (int i = n - 1; i >= j; --i)
                p.c_[static_cast<std::size_t>(i)] += dx * p.c_[static_cast<std::size_t>(i) + 1];
        return p;
    }

    // p(s * x).
    Poly scale_arg(double s) const {
        Poly p = *this;
        double f = 1.0;
        for (std::size_t i = 1; i < p.c_.size(); ++i) {
            f *= s;
            p.c_[i] *= f;
        }
        return p;
    }

    void trim(double tol = 0.0) {
        while (c_.size() > 1 && std::abs(c_.back()) <= tol) c_.pop_back();
    }

private:
    std::vector<double> c_;
};

// Truncated Taylor expansion: a[i] = f^(i)(x0) / i!, i = 0..order.
struct Jet {
    std::vector<double> a;

    explicit Jet(int order = 0) : a(static_cast<std::size_t>(order) + 1, 0.0) {}

    int order() const { return static_cast<int>(a.size()) - 1; }
    double value() const { return a[0]; }

    static Jet from_derivatives(std::span<const double> derivs) {
        Jet j(static_cast<int>(derivs.size()) - 1);
        double fact = 1.0;
        for (std::size_t i = 0; i < derivs.size(); ++i) {
            if (i > 0) fact *= static_cast<double>(i);
            j.a[i] = derivs[i] / fact;
        }
        return j;
    }

    std::vector<double> to_derivatives() const {
        std::vector<double> d(a.size());
        double fact = 1.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i > 0) fact *= static_cast<double>(i);
            d[i] = a[i] * fact;
        }
        return d;
    }

    double derivative(int j) const {
        if (j > order()) return 0.0;
        double fact = 1.0;
        for (int t = 2; t <= j; ++t) fact *= static_cast<double>(t);
        return a[static_cast<std::size_t>(j)] * fact;
    }

    // Jet of a polynomial p (in local coordinate u) at u = u0.
    static Jet of_poly(const Poly& p, double u0, int order) {
        Jet j(order);
        Poly d = p;
        double fact = 1.0;
        for (int i = 0; i <= order; ++i) {
            if (i > 0) {
                fact *= static_cast<double>(i);
                d = d.derivative();
            }
            j.a[static_cast<std::size_t>(i)] = d(u0) / fact;
        }
        return j;
    }

    Jet truncated(int order) const {
        Jet r(order);
        for (int i = 0; i <= std::min(order, this->order()); ++i)
            r.a[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)];
        return r;
    }

    static Jet mul(const Jet& x, const Jet& y) {
        const int k = std::min(x.order(), y.order());
        Jet r(k);
        for (int i = 0; i <= k; ++i)
            for (int j = 0; i + j <= k; ++j)
                r.a[static_cast<std::size_t>(i + j)] +=
                    x.a[static_cast<std::size_t>(i)] * y.a[static_cast<std::size_t>(j)];
        return r;
    }

    // Jet of f∘g at x0, where `outer` expands f at g(x0) and `inner` expands
    // g at x0.  The inner constant term is the expansion point of `outer` and
    // drops out of the composition.
    static Jet compose(const Jet& outer, const Jet& inner) {
        const int k = std::min(outer.order(), inner.order());
        Jet w = inner.truncated(k);
        w.a[0] = 0.0;
        Jet r(k);
        r.a[0] = outer.a[static_cast<std::size_t>(k)];
        for (int m = k - 1; m >= 0; --m) {
            r = Jet::mul(r, w);
            r.a[0] += outer.a[static_cast<std::size_t>(m)];
        }
        return r;
    }

    // Jet of the inverse map at f(x0), given the jet of f at x0 (f'(x0) != 0).
    static Jet reversion(const Jet& f) {
        const int k = f.order();
        if (k < 1 || f.a[1] == 0.0)
            raise(ErrorCode::invariant_violation, "jet reversion needs nonzero first coefficient");
        // Powers of the deviation F~ = f - f(x0).
        std::vector<Jet> pw(static_cast<std::size_t>(k) + 1, Jet(k));
        Jet dev = f;
        dev.a[0] = 0.0;
        pw[1] = dev;
        for (int m = 2; m <= k; ++m) pw[static_cast<std::size_t>(m)] = Jet::mul(pw[static_cast<std::size_t>(m - 1)], dev);
        Jet b(k);
        b.a[0] = 0.0;  // caller re-bases the constant term (inverse value)
        for (int n = 1; n <= k; ++n) {
            double rhs = (n == 1) ? 1.0 : 0.0;
            for (int m = 1; m < n; ++m)
                rhs -= b.a[static_cast<std::size_t>(m)] *
                       pw[static_cast<std::size_t>(m)].a[static_cast<std::size_t>(n)];
            b.a[static_cast<std::size_t>(n)] =
                rhs / pw[static_cast<std::size_t>(n)].a[static_cast<std::size_t>(n)];
        }
        return b;
    }
};

// Unique polynomial of degree 2m+1 on [0, h] matching derivative values
// d0[0..m] at u=0 and d1[0..m] at u=h.  Coefficients are returned in the
// local coordinate u.  Computed by Newton divided differences with repeated
// nodes, then expanded to monomial form.
inline Poly hermite_two_point(double h, std::span<const double> d0, std::span<const double> d1) {
    if (d0.size() != d1.size() || d0.empty())
        raise(ErrorCode::dimension_mismatch, "hermite endpoint data sizes differ");
    const int m = static_cast<int>(d0.size()) - 1;
    const int n = 2 * (m + 1);  // number of (repeated) nodes
    std::vector<double> nodes(static_cast<std::size_t>(n));
    for (int i = 0; i <= m; ++i) nodes[static_cast<std::size_t>(i)] = 0.0;
    for (int i = 0; i <= m; ++i) nodes[static_cast<std::size_t>(m + 1 + i)] = h;

    auto deriv_over_fact = [&](bool right, int j) {
        double fact = 1.0;
        for (int t = 2; t <= j; ++t) fact *= static_cast<double>(t);
        return (right ? d1[static_cast<std::size_t>(j)] : d0[static_cast<std::size_t>(j)]) / fact;
    };

    // table[i][j] = f[nodes_i .. nodes_{i+j}]
    std::vector<std::vector<double>> table(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) table[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(n - i));
    for (int i = 0; i < n; ++i) table[static_cast<std::size_t>(i)][0] = deriv_over_fact(i > m, 0);
    for (int j = 1; j < n; ++j) {
        for (int i = 0; i + j < n; ++i) {
            const double ua = nodes[static_cast<std::size_t>(i)];
            const double ub = nodes[static_cast<std::size_t>(i + j)];
            if (ua == ub) {
                table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = deriv_over_fact(i > m, j);
            } else {
                table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    (table[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(j - 1)] -
                     table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - 1)]) /
                    (ub - ua);
            }
        }
    }

    // Expand the Newton form sum_j table[0][j] * prod_{t<j} (u - nodes_t).
    Poly result = Poly::constant(0.0);
    Poly basis = Poly::constant(1.0);
    for (int j = 0; j < n; ++j) {
        result = result + basis * table[0][static_cast<std::size_t>(j)];
        basis = basis * Poly({-nodes[static_cast<std::size_t>(j)], 1.0});
    }
    result.trim();
    return result;
}

}  // namespace ckroot
