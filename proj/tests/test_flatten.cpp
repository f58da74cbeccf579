#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ckroot/flatten.hpp"
#include "support.hpp"

using ckroot::analyze;
using ckroot::ck_distance;
using ckroot::flatten_to_polynomial;
using ckroot::PiecewisePolyDiffeo;
using Catch::Matchers::WithinAbs;

TEST_CASE("already-flat polynomial input is returned unchanged", "[flatten]") {
    const PiecewisePolyDiffeo f = PiecewisePolyDiffeo::flat_bump(0.1, 3);  // flat to order 3
    const PiecewisePolyDiffeo p = flatten_to_polynomial(f, 2, 0.1);
    REQUIRE(p.piece_count() == 1);
    REQUIRE(p.pieces()[0].coeffs() == f.pieces()[0].coeffs());
    REQUIRE(ck_distance(f, p, 2) == 0.0);
}

TEST_CASE("flattening raises the endpoint contact order", "[flatten]") {
    const PiecewisePolyDiffeo f = PiecewisePolyDiffeo::flat_bump(0.2, 1);
    REQUIRE(analyze(f, 1).flat_order == 1);
    const double r = 0.2;
    const PiecewisePolyDiffeo p = flatten_to_polynomial(f, 1, r);
    REQUIRE(p.piece_count() == 1);
    const auto a = analyze(p, 2);
    REQUIRE(a.ck_flat);  // now flat to order 2
    REQUIRE(a.fixed_point_free);
    REQUIRE(a.direction == +1);
    REQUIRE(ck_distance(f, p, 1) < r / 4.0);
}

TEST_CASE("piecewise sample data flattens to a single polynomial", "[flatten]") {
    // f(x) = x + 0.05 sin^3(pi x), sampled with two derivative orders.
    const double pi = 3.14159265358979323846;
    auto v = [&](double x) { return x + 0.05 * std::pow(std::sin(pi * x), 3); };
    auto d1 = [&](double x) {
        return 1.0 + 0.15 * pi * std::sin(pi * x) * std::sin(pi * x) * std::cos(pi * x);
    };
    auto d2 = [&](double x) {
        const double s = std::sin(pi * x), c = std::cos(pi * x);
        return 0.15 * pi * pi * s * (2.0 * c * c - s * s);
    };
    std::vector<double> nodes;
    std::vector<std::vector<double>> data;
    for (int i = 0; i <= 32; ++i) {
        const double x = static_cast<double>(i) / 32.0;
        nodes.push_back(x);
        data.push_back({v(x), d1(x), d2(x)});
    }
    const PiecewisePolyDiffeo f = PiecewisePolyDiffeo::from_hermite_data(nodes, data, 2);
    const PiecewisePolyDiffeo p = flatten_to_polynomial(f, 1, 0.2);
    REQUIRE(p.piece_count() == 1);
    REQUIRE(ck_distance(f, p, 1) < 0.05);
    REQUIRE(analyze(p, 2).ck_flat);
}

TEST_CASE("unattainable radius reports approximation failure", "[flatten]") {
    const PiecewisePolyDiffeo f = PiecewisePolyDiffeo::flat_bump(0.2, 1);
    REQUIRE(oracle::thrown_code([&] { flatten_to_polynomial(f, 1, 1e-9); }) ==
            ckroot::ErrorCode::approximation_failed);
}

TEST_CASE("flattening gates on flatness and fixed points", "[flatten]") {
    const PiecewisePolyDiffeo steep = PiecewisePolyDiffeo::from_polynomial({0.0, 0.8, 0.2});
    REQUIRE(oracle::thrown_code([&] { flatten_to_polynomial(steep, 1, 0.1); }) ==
            ckroot::ErrorCode::flatness_violation);
    REQUIRE(oracle::thrown_code([&] {
                flatten_to_polynomial(PiecewisePolyDiffeo::identity(), 1, 0.1);
            }) == ckroot::ErrorCode::interior_fixed_point);
}
