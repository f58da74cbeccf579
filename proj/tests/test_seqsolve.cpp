#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ckroot/seqsolve.hpp"
#include "support.hpp"

using ckroot::ChoiceMode;
using ckroot::ChoiceProblem;
using ckroot::ChoiceSolution;
using ckroot::ErrorCode;

namespace {

// Independent greedy feasibility check: solve every window deficit exactly
// (no thresholding, no shared code with the library) and test the residuals.
bool feasible_oracle(const ChoiceProblem& p) {
    std::vector<double> x(static_cast<std::size_t>(p.length), 0.0);
    double denom = 0.0;
    for (int q = 0; q < p.N; ++q) denom += p.d[0][static_cast<std::size_t>(q)];
    for (int q = 0; q < p.N; ++q) x[static_cast<std::size_t>(q)] = p.a[0] / denom;
    for (std::size_t w = 1; w < p.window_count(); ++w) {
        double partial = 0.0;
        for (int q = 0; q + 1 < p.N; ++q)
            partial += p.d[w][static_cast<std::size_t>(q)] * x[w + static_cast<std::size_t>(q)];
        x[w + static_cast<std::size_t>(p.N) - 1] =
            (p.a[w] - partial) / p.d[w][static_cast<std::size_t>(p.N) - 1];
    }
    for (std::size_t w = 0; w < p.window_count(); ++w) {
        double s = 0.0;
        for (int q = 0; q < p.N; ++q)
            s += p.d[w][static_cast<std::size_t>(q)] * x[w + static_cast<std::size_t>(q)];
        if (!(std::abs(s - p.a[w]) < p.r) || !std::isfinite(s)) return false;
    }
    return true;
}

ChoiceProblem smooth_instance(int N, int n, double M, double r, unsigned salt) {
    ChoiceProblem p;
    p.N = N;
    p.length = N * n;
    p.M = M;
    p.r = r;
    const std::size_t W = p.window_count();
    const double amp = 0.04;
    for (std::size_t i = 0; i < W; ++i) {
        std::vector<double> row(static_cast<std::size_t>(N));
        for (int q = 0; q < N; ++q)
            row[static_cast<std::size_t>(q)] =
                1.0 + amp * std::sin(0.3 * static_cast<double>(i) + 0.7 * q + 0.1 * salt);
        p.d.push_back(row);
        p.a.push_back(0.3 * std::cos(0.25 * static_cast<double>(i) + 0.05 * salt));
    }
    return p;
}

}  // namespace

TEST_CASE("quasi-monotone degree on pinned sequences") {
    auto deg = [](std::vector<double> s) { return ckroot::quasi_monotone_degree(s).degree; };
    CHECK(deg({1, 2, 3, 4}) == 1);
    CHECK(deg({1, 3, 2}) == 1);
    CHECK(deg({1, 3, 2, 4, 1}) == 3);

    const auto dec = ckroot::quasi_monotone_degree({1, 3, 2, 4, 1});
    CHECK(dec.break_indices == std::vector<std::size_t>{2, 3, 4});
    CHECK(dec.break_indices.size() <= static_cast<std::size_t>(dec.degree));
}

TEST_CASE("quasi-monotone degree matches the brute-force cover and split is a witness") {
    std::uniform_int_distribution<int> len(2, 12), val(-3, 3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> s(static_cast<std::size_t>(len(oracle::rng())));
        for (auto& v : s) v = val(oracle::rng());
        const auto dec = ckroot::quasi_monotone_degree(s);
        CAPTURE(s);
        CHECK(dec.degree == oracle::quasi_degree_bruteforce(s));
        CHECK(dec.break_indices.size() <= static_cast<std::size_t>(dec.degree));

        // every stretch between consecutive breaks must be monotone
        std::vector<std::size_t> cuts{1};
        cuts.insert(cuts.end(), dec.break_indices.begin(), dec.break_indices.end());
        cuts.push_back(s.size());
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            bool up = true, down = true;
            for (std::size_t i = cuts[c]; i < cuts[c + 1]; ++i) {
                if (s[i] < s[i - 1]) up = false;
                if (s[i] > s[i - 1]) down = false;
            }
            CHECK((up || down));
        }
    }
}

TEST_CASE("quasi-monotone degree is invariant under sign flip and reversal") {
    std::uniform_int_distribution<int> len(2, 10), val(-4, 4);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> s(static_cast<std::size_t>(len(oracle::rng())));
        for (auto& v : s) v = val(oracle::rng());
        std::vector<double> neg(s), rev(s);
        for (auto& v : neg) v = -v;
        std::reverse(rev.begin(), rev.end());
        const int d = ckroot::quasi_monotone_degree(s).degree;
        CHECK(ckroot::quasi_monotone_degree(neg).degree == d);
        CHECK(ckroot::quasi_monotone_degree(rev).degree == d);
    }
}

TEST_CASE("quasi-monotone degree needs two entries") {
    CHECK(oracle::thrown_code([] { ckroot::quasi_monotone_degree({1.0}); }) ==
          ErrorCode::precondition_violated);
}

TEST_CASE("ladder segment count at M = 2") {
    CHECK(ckroot::ladder_segment_count(2.0) == 17);
}

TEST_CASE("zero targets give the identically-zero solution") {
    ChoiceProblem p;
    p.N = 2;
    p.length = 6;
    p.M = 2.0;
    p.r = 0.01;
    for (std::size_t w = 0; w < p.window_count(); ++w) {
        p.d.push_back({1.0, 1.1});
        p.a.push_back(0.0);
    }
    const auto sol = ckroot::solve_choice(p, ChoiceMode::adaptive);
    for (double v : sol.x) CHECK(v == 0.0);
    CHECK(sol.achieved_K == 0.0);
    CHECK(sol.max_window_residual == 0.0);
}

TEST_CASE("constant-coefficient instance solves exactly") {
    ChoiceProblem p;
    p.N = 2;
    p.length = 4;
    p.M = 2.0;
    p.r = 0.01;
    for (std::size_t w = 0; w < p.window_count(); ++w) {
        p.d.push_back({1.0, 1.0});
        p.a.push_back(0.1);
    }
    const auto sol = ckroot::solve_choice(p, ChoiceMode::adaptive);
    REQUIRE(sol.x.size() == 4);
    CHECK(sol.x[0] == Catch::Approx(0.05).margin(1e-15));
    CHECK(sol.x[1] == Catch::Approx(0.05).margin(1e-15));
    CHECK(sol.max_window_residual < 0.25 * p.r + 1e-15);

    const auto rep = ckroot::verify_choice(p, sol);
    CHECK(rep.pass);
    CHECK(rep.achieved_K == Catch::Approx(2.0 * 0.05));

    // perturbing one unknown by 10 r must be flagged with the right windows
    ChoiceSolution bad = sol;
    bad.x[1] += 10.0 * p.r;
    const auto brep = ckroot::verify_choice(p, bad);
    CHECK_FALSE(brep.pass);
    CHECK(brep.violated_windows == std::vector<std::size_t>{1, 2});
}

TEST_CASE("random smooth instances: adaptive verdict matches the oracle") {
    std::uniform_int_distribution<int> pick(0, 1);
    std::uniform_real_distribution<double> Mdist(1.1, 2.0);
    int agreements = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int N = 2 + pick(oracle::rng());
        const int n = 2 + pick(oracle::rng());
        const double M = Mdist(oracle::rng());
        ChoiceProblem p = smooth_instance(N, n, M, 0.05, static_cast<unsigned>(trial));
        REQUIRE_NOTHROW(p.validate());

        const bool oracle_feasible = feasible_oracle(p);
        bool solver_feasible = true;
        ChoiceSolution sol;
        try {
            sol = ckroot::solve_choice(p, ChoiceMode::adaptive);
        } catch (const ckroot::Error&) {
            solver_feasible = false;
        }
        CHECK(oracle_feasible == solver_feasible);
        if (solver_feasible) {
            const auto rep = ckroot::verify_choice(p, sol);
            CHECK(rep.pass);
            const double bound = sol.achieved_K / static_cast<double>(p.N) + 1e-12;
            for (double v : sol.x) CHECK(std::abs(v) <= bound);
        }
        agreements += (oracle_feasible == solver_feasible);
    }
    CHECK(agreements == 100);
}

TEST_CASE("ladder mode solves a one-window instance exactly") {
    ChoiceProblem p;
    p.N = 3;
    p.length = 3;
    p.M = 2.5;  // M > 2n with n = 1
    p.r = 1e-9;
    p.d.push_back({1.0, 1.1, 0.9});
    p.a.push_back(0.3);
    const auto sol = ckroot::solve_choice(p, ChoiceMode::paper_ladder);
    CHECK(sol.max_window_residual < 1e-12);
    CHECK(sol.x[0] == sol.x[1]);
    CHECK(sol.x[1] == sol.x[2]);
}

TEST_CASE("ladder mode magnitudes are exactly M^(4t)/N") {
    ChoiceProblem p;
    p.N = 2;
    p.length = 4;
    p.M = 4.2;  // M > 2n with n = 2
    p.r = 1e9;  // only the magnitude pattern is being pinned here
    for (std::size_t w = 0; w < p.window_count(); ++w) {
        p.d.push_back({1.0 + 0.01 * static_cast<double>(w), 1.0});
        p.a.push_back(0.5 - 0.05 * static_cast<double>(w));
    }
    const auto sol = ckroot::solve_choice(p, ChoiceMode::paper_ladder);
    const double mag1 = std::pow(4.2, 4.0) / 2.0;
    CHECK(std::abs(sol.x[2]) == mag1);
    CHECK(std::abs(sol.x[3]) == mag1);
    const double cap = std::pow(4.2, 4.0 * ckroot::ladder_segment_count(4.2)) / 2.0;
    for (double v : sol.x) CHECK(std::abs(v) <= cap);

    // with a realistic residual bound the same scheme is infeasible: the
    // rung magnitudes dwarf the targets
    p.r = 0.05;
    CHECK(oracle::thrown_code([&] { ckroot::solve_choice(p, ChoiceMode::paper_ladder); }) ==
          ErrorCode::solver_infeasible);
}

TEST_CASE("ladder mode requires M > 2n") {
    ChoiceProblem p;
    p.N = 2;
    p.length = 4;  // n = 2
    p.M = 3.0;     // not > 4
    p.r = 0.1;
    for (std::size_t w = 0; w < p.window_count(); ++w) {
        p.d.push_back({1.0, 1.0});
        p.a.push_back(0.1);
    }
    CHECK(oracle::thrown_code([&] { ckroot::solve_choice(p, ChoiceMode::paper_ladder); }) ==
          ErrorCode::precondition_violated);
}

TEST_CASE("problem validation rejects malformed instances") {
    ChoiceProblem good;
    good.N = 2;
    good.length = 4;
    good.M = 2.0;
    good.r = 0.1;
    for (std::size_t w = 0; w < good.window_count(); ++w) {
        good.d.push_back({1.0, 1.0});
        good.a.push_back(0.1);
    }
    REQUIRE_NOTHROW(good.validate());

    auto p = good;
    p.d[1] = {0.4, 1.0};  // below 1/M
    CHECK(oracle::thrown_code([&] { p.validate(); }) == ErrorCode::invariant_violation);

    p = good;
    p.d[1] = {1.0};  // wrong width
    CHECK(oracle::thrown_code([&] { p.validate(); }) == ErrorCode::dimension_mismatch);

    p = good;
    p.a.pop_back();  // target count mismatch
    CHECK(oracle::thrown_code([&] { p.validate(); }) == ErrorCode::dimension_mismatch);

    p = good;
    p.a[1] = 1.9;  // |a| fine but neighbor gap 1.8 >= M/N = 1
    CHECK(oracle::thrown_code([&] { p.validate(); }) == ErrorCode::invariant_violation);

    p = good;
    p.d[0] = {0.6, 0.6};
    p.d[1] = {1.8, 1.8};  // row-to-row jump 1.2 >= M/N = 1
    p.d[2] = {1.8, 1.8};
    CHECK(oracle::thrown_code([&] { p.validate(); }) == ErrorCode::invariant_violation);

    ChoiceSolution s;
    s.x = {0.0, 0.0};  // wrong length
    CHECK(oracle::thrown_code([&] { ckroot::verify_choice(good, s); }) ==
          ErrorCode::dimension_mismatch);
}
