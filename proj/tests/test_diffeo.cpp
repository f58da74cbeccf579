#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ckroot/diffeo.hpp"
#include "support.hpp"

using ckroot::Error;
using ckroot::ErrorCode;
using ckroot::PiecewisePolyDiffeo;
using ckroot::Poly;
using Catch::Matchers::WithinAbs;

TEST_CASE("identity evaluates like x at every order", "[diffeo]") {
    const PiecewisePolyDiffeo id = PiecewisePolyDiffeo::identity();
    REQUIRE(id.is_identity());
    REQUIRE(id(0.37) == 0.37);
    REQUIRE(id.evaluate(0.5, 1) == 1.0);
    REQUIRE(id.evaluate(0.5, 2) == 0.0);
    REQUIRE(id.evaluate(0.0, 0) == 0.0);
    REQUIRE(id.evaluate(1.0, 0) == 1.0);
}

TEST_CASE("flat displacement family frozen values", "[diffeo]") {
    const PiecewisePolyDiffeo f = PiecewisePolyDiffeo::flat_bump(0.2, 1);
    REQUIRE_THAT(f(0.5), WithinAbs(0.5125, 1e-15));
    REQUIRE(f(0.0) == 0.0);
    REQUIRE(f(1.0) == 1.0);
    REQUIRE_FALSE(f.is_identity());
    for (double x : {0.1, 0.33, 0.72, 0.95}) {
        REQUIRE_THAT(f(x), WithinAbs(oracle::bump(0.2, 1, x), 1e-14));
        REQUIRE_THAT(f.evaluate(x, 1), WithinAbs(oracle::bump_d1(0.2, 1, x), 1e-13));
        const double fd2 = oracle::central_diff([&](double u) { return oracle::bump(0.2, 1, u); },
                                                x, 2, 1e-4);
        REQUIRE_THAT(f.evaluate(x, 2), WithinAbs(fd2, 1e-5));
    }

    const PiecewisePolyDiffeo g = PiecewisePolyDiffeo::flat_bump(0.15, 3);
    for (double x : {0.2, 0.5, 0.81})
        REQUIRE_THAT(g(x), WithinAbs(oracle::bump(0.15, 3, x), 1e-14));
}

TEST_CASE("derivative order and domain guards", "[diffeo]") {
    const PiecewisePolyDiffeo f = PiecewisePolyDiffeo::flat_bump(0.2, 1);
    REQUIRE(oracle::thrown_code([&] { f.evaluate(0.5, 65); }) == ErrorCode::order_too_high);
    REQUIRE(oracle::thrown_code([&] { f.evaluate(1.5, 0); }) == ErrorCode::out_of_domain);
    REQUIRE(oracle::thrown_code([&] { f.evaluate(-0.5, 0); }) == ErrorCode::out_of_domain);
    REQUIRE_FALSE(oracle::thrown_code([&] { f.evaluate(0.5, 64); }).has_value());
}

TEST_CASE("construction rejects non-diffeomorphisms", "[diffeo]") {
    REQUIRE(oracle::thrown_code([] { PiecewisePolyDiffeo::from_polynomial({0.0, 2.0}); }) ==
            ErrorCode::invariant_violation);
    REQUIRE(oracle::thrown_code([] { PiecewisePolyDiffeo::from_polynomial({0.5, 0.5}); }) ==
            ErrorCode::invariant_violation);
    // -x + 2x^2 fixes 0 and 1 but decreases near 0.
    REQUIRE(oracle::thrown_code([] { PiecewisePolyDiffeo::from_polynomial({0.0, -1.0, 2.0}); }) ==
            ErrorCode::invariant_violation);
    // Breakpoints must strictly increase.
    REQUIRE(oracle::thrown_code([] {
                PiecewisePolyDiffeo({0.0, 0.5, 0.5, 1.0},
                                    {Poly({0.0, 1.0}), Poly({0.5, 1.0}), Poly({0.5, 1.0})}, 0);
            }) == ErrorCode::not_increasing);
}

TEST_CASE("interior derivative jumps are rejected at the declared order", "[diffeo]") {
    // Left piece u, right piece 0.5 + 0.5u + u^2: continuous values, f(1)=1,
    // derivative jump 1 -> 0.5 at x = 0.5.
    const std::vector<double> breaks{0.0, 0.5, 1.0};
    const std::vector<Poly> pieces{Poly({0.0, 1.0}), Poly({0.5, 0.5, 1.0})};
    REQUIRE(oracle::thrown_code([&] { PiecewisePolyDiffeo(breaks, pieces, 1); }) ==
            ErrorCode::invariant_violation);
    const PiecewisePolyDiffeo f(breaks, pieces, 0);
    REQUIRE(f.piece_count() == 2);
    // Right piece governs at the breakpoint.
    REQUIRE_THAT(f.jet_at(0.5, 1).to_derivatives()[1], WithinAbs(0.5, 1e-14));
    REQUIRE_THAT(f.continuity_gap(0), WithinAbs(0.0, 1e-14));
    REQUIRE(f.continuity_gap(1) > 0.4);
}

TEST_CASE("hermite assembly matches prescribed node data and snaps endpoints", "[diffeo]") {
    auto d = [](double c, int k, double x) {
        return std::vector<double>{oracle::bump(c, k, x), oracle::bump_d1(c, k, x)};
    };
    const std::vector<double> nodes{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<std::vector<double>> data;
    for (double x : nodes) data.push_back(d(0.1, 1, x));
    const PiecewisePolyDiffeo f = PiecewisePolyDiffeo::from_hermite_data(nodes, data, 1);
    REQUIRE(f.piece_count() == 4);
    REQUIRE(f(0.0) == 0.0);
    REQUIRE(f(1.0) == 1.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        REQUIRE_THAT(f(nodes[i]), WithinAbs(data[i][0], 1e-12));
        REQUIRE_THAT(f.evaluate(nodes[i], 1), WithinAbs(data[i][1], 1e-12));
    }
    // Interpolation error between nodes stays small for this gentle family.
    for (double x : {0.1, 0.4, 0.6, 0.9})
        REQUIRE_THAT(f(x), WithinAbs(oracle::bump(0.1, 1, x), 1e-4));
    REQUIRE(f.continuity_gap(1) < 1e-12);
}

TEST_CASE("piece lookup selects the right-hand piece at breakpoints", "[diffeo]") {
    const std::vector<double> breaks{0.0, 0.3, 0.7, 1.0};
    const std::vector<Poly> pieces{Poly({0.0, 1.0}), Poly({0.3, 1.0}), Poly({0.7, 1.0})};
    const PiecewisePolyDiffeo f(breaks, pieces, 0);
    REQUIRE(f.piece_index(0.0) == 0);
    REQUIRE(f.piece_index(0.3) == 1);
    REQUIRE(f.piece_index(0.699) == 1);
    REQUIRE(f.piece_index(0.7) == 2);
    REQUIRE(f.piece_index(1.0) == 2);
}
