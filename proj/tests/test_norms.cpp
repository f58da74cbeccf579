#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ckroot/norms.hpp"
#include "support.hpp"

using ckroot::analyze;
using ckroot::AnalysisReport;
using ckroot::ck_distance;
using ckroot::ck_distance_report;
using ckroot::ck_norm;
using ckroot::CkNormReport;
using ckroot::PiecewisePolyDiffeo;
using ckroot::Poly;
using Catch::Matchers::WithinAbs;

namespace {
// Closed-form suprema for the displacement family x + c [x(1-x)]^(k+1):
// order 0 at x = 1/2 gives c/4^(k+1); order 1 (k=1) attains
// 2c * max |x(1-x)(1-2x)| = 2c / (6 sqrt(3)).
double bump_sup0(double c, int k) { return c / std::pow(4.0, k + 1); }
double bump_sup1_k1(double c) { return 2.0 * c / (6.0 * std::sqrt(3.0)); }
}  // namespace

TEST_CASE("frozen suprema of the flat displacement family", "[norms]") {
    const PiecewisePolyDiffeo f02 = PiecewisePolyDiffeo::flat_bump(0.2, 1);
    const PiecewisePolyDiffeo f04 = PiecewisePolyDiffeo::flat_bump(0.4, 1);
    const PiecewisePolyDiffeo id = PiecewisePolyDiffeo::identity();

    const CkNormReport r = ck_distance_report(f02, id, 1);
    REQUIRE_THAT(r.per_order[0], WithinAbs(0.0125, 1e-9));
    REQUIRE_THAT(r.per_order[0], WithinAbs(bump_sup0(0.2, 1), 1e-9));
    REQUIRE_THAT(r.argmax[0], WithinAbs(0.5, 1e-6));
    REQUIRE_THAT(r.per_order[1], WithinAbs(bump_sup1_k1(0.2), 1e-8));
    REQUIRE_THAT(r.overall, WithinAbs(bump_sup1_k1(0.2), 1e-8));

    REQUIRE_THAT(ck_distance_report(f04, id, 1).per_order[1],
                 WithinAbs(bump_sup1_k1(0.4), 1e-8));
    REQUIRE_THAT(ck_norm(f02, 0), WithinAbs(0.0125, 1e-9));

    // Distance within the family at order 0: |c - c'| / 16 for k = 1.
    const PiecewisePolyDiffeo f03 = PiecewisePolyDiffeo::flat_bump(0.3, 1);
    REQUIRE_THAT(ck_distance(f02, f03, 0), WithinAbs(0.1 / 16.0, 1e-9));
}

TEST_CASE("sampled distance is a pseudometric", "[norms]") {
    const PiecewisePolyDiffeo a = PiecewisePolyDiffeo::flat_bump(0.1, 1);
    const PiecewisePolyDiffeo b = PiecewisePolyDiffeo::flat_bump(0.25, 1);
    const PiecewisePolyDiffeo c = PiecewisePolyDiffeo::flat_bump(0.2, 2);
    for (int k = 0; k <= 1; ++k) {
        const double dab = ck_distance(a, b, k);
        const double dba = ck_distance(b, a, k);
        REQUIRE(dab == dba);
        const double dac = ck_distance(a, c, k);
        const double dcb = ck_distance(c, b, k);
        REQUIRE(dab <= dac + dcb + 1e-12);
        REQUIRE(ck_distance(a, a, k) == 0.0);
    }
}

TEST_CASE("distance order is capped by the smoothness class", "[norms]") {
    const std::vector<double> nodes{0.0, 0.5, 1.0};
    std::vector<std::vector<double>> data;
    for (double x : nodes)
        data.push_back({oracle::bump(0.2, 1, x), oracle::bump_d1(0.2, 1, x)});
    const PiecewisePolyDiffeo f = PiecewisePolyDiffeo::from_hermite_data(nodes, data, 1);
    const PiecewisePolyDiffeo id = PiecewisePolyDiffeo::identity();
    REQUIRE(oracle::thrown_code([&] { ck_distance(f, id, 2); }) ==
            ckroot::ErrorCode::order_too_high);
    REQUIRE_FALSE(oracle::thrown_code([&] { ck_distance(f, id, 1); }).has_value());
}

TEST_CASE("analysis reports flatness order of the displacement family", "[norms]") {
    for (int k = 1; k <= 4; ++k) {
        const AnalysisReport a = analyze(PiecewisePolyDiffeo::flat_bump(0.2, k), k);
        CAPTURE(k);
        REQUIRE(a.ck_flat);
        REQUIRE(a.flat_order == k);  // flat to order k but not k+1
        REQUIRE(a.direction == +1);
        REQUIRE(a.fixed_point_free);
        REQUIRE_FALSE(a.is_identity);
    }
}

TEST_CASE("analysis of identity, negative, and mixed displacement", "[norms]") {
    const AnalysisReport id_report = analyze(PiecewisePolyDiffeo::identity(), 2);
    REQUIRE(id_report.is_identity);
    REQUIRE(id_report.direction == 0);
    REQUIRE_FALSE(id_report.fixed_point_free);
    REQUIRE(id_report.flat_order >= 3);

    // x - 0.2 [x(1-x)]^2 lies below the identity.
    Poly x({0.0, 1.0}), w({0.0, 1.0, -1.0});
    const Poly below = x - w * w * 0.2;
    const AnalysisReport neg = analyze(PiecewisePolyDiffeo::from_polynomial(below.coeffs()), 1);
    REQUIRE(neg.direction == -1);
    REQUIRE(neg.fixed_point_free);

    // x + 0.3 [x(1-x)]^2 (1-2x) crosses the identity at 1/2.
    const Poly crossing = x + w * w * Poly({1.0, -2.0}) * 0.3;
    const AnalysisReport mixed = analyze(PiecewisePolyDiffeo::from_polynomial(crossing.coeffs()), 1);
    REQUIRE(mixed.direction == 0);
    REQUIRE_FALSE(mixed.fixed_point_free);
}

TEST_CASE("suprema of derivative differences match finite differences", "[norms]") {
    const PiecewisePolyDiffeo f = PiecewisePolyDiffeo::flat_bump(0.15, 2);
    const PiecewisePolyDiffeo id = PiecewisePolyDiffeo::identity();
    const CkNormReport r = ck_distance_report(f, id, 2);
    // Scan for the sup of |f'' - 0| directly.
    double sup2 = 0.0;
    for (int i = 0; i <= 20000; ++i) {
        const double x = static_cast<double>(i) / 20000.0;
        sup2 = std::max(sup2, std::abs(oracle::central_diff(
                                   [&](double u) { return oracle::bump(0.15, 2, u); }, x, 2, 1e-4)));
    }
    REQUIRE_THAT(r.per_order[2], WithinAbs(sup2, 1e-4));
}
