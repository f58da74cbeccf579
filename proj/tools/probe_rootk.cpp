// Scratch diagnostics for the root pipeline; not part of the build.
#include <chrono>
#include <cstdio>

#include "ckroot/rootk.hpp"

using namespace ckroot;
using Clock = std::chrono::steady_clock;

static double ms(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

int main(int argc, char** argv) {
    const double c = argc > 1 ? std::atof(argv[1]) : 0.1;
    const int k = argc > 2 ? std::atoi(argv[2]) : 1;
    const double r = argc > 3 ? std::atof(argv[3]) : 0.2;
    const int N = argc > 4 ? std::atoi(argv[4]) : 16;

    const auto f = PiecewisePolyDiffeo::flat_bump(c, k);
    auto t0 = Clock::now();
    const auto p = flatten_to_polynomial(f, k, r);
    auto t1 = Clock::now();
    std::printf("flatten: %.1f ms, pieces=%zu\n", ms(t0, t1), p.breakpoints().size() - 1);
    for (double x : {1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.2, 0.5, 0.9, 0.99}) {
        const auto jp = p.jet_at(x, k + 1).to_derivatives();
        std::printf("  x=%-8g  disp=%10.3e  p'-1=%10.3e", x, p(x) - x, jp[1] - 1.0);
        for (int j = 2; j <= k + 1; ++j) std::printf("  p^(%d)=%10.3e", j, jp[(size_t)j]);
        std::printf("\n");
    }

    const double rr = 0.7 * r;
    t0 = Clock::now();
    AnchorSet anchors;
    try {
        anchors = select_anchors(p, rr, k);
    } catch (const std::exception& e) {
        std::printf("anchors FAILED: %s (%.1f ms)\n", e.what(), ms(t0, Clock::now()));
        return 1;
    }
    t1 = Clock::now();
    std::printf("anchors: %.1f ms, n=%d, x0=%g, 1-xn=%g, l=%d\n", ms(t0, t1), anchors.n,
                anchors.x.front(), 1.0 - anchors.x.back(), anchors.l_estimate);

    t0 = Clock::now();
    const auto grid = build_grid(p, anchors, N);
    t1 = Clock::now();
    std::printf("grid: %.1f ms, nodes=%zu\n", ms(t0, t1), grid.z.size());

    t0 = Clock::now();
    const auto table = finite_difference_table(grid, k);
    t1 = Clock::now();
    std::printf("table: %.1f ms\n", ms(t0, t1));

    t0 = Clock::now();
    std::vector<std::vector<double>> targets((size_t)k + 2);
    for (int j = 0; j <= k + 1; ++j) {
        targets[(size_t)j].resize(grid.node_count());
        for (size_t i = 0; i < grid.node_count(); ++i)
            targets[(size_t)j][i] = p.evaluate(grid.z[i], j);
    }
    t1 = Clock::now();
    std::printf("targets: %.1f ms\n", ms(t0, t1));

    double min_gap = 1.0;
    for (size_t i = 0; i + 1 < grid.z.size(); ++i)
        min_gap = std::min(min_gap, grid.z[i + 1] - grid.z[i]);
    const double eps = std::min(1.0 / (double(N) * N), 0.03 * min_gap);
    std::printf("min_gap=%g eps=%g\n", min_gap, eps);

    t0 = Clock::now();
    DerivativeAssignment asg;
    try {
        asg = assign_derivatives(grid, table, targets, k, rr, default_config(), eps);
    } catch (const std::exception& e) {
        std::printf("assign FAILED: %s (%.1f ms)\n", e.what(), ms(t0, Clock::now()));
        return 1;
    }
    t1 = Clock::now();
    std::printf("assign: %.1f ms, K=%g, C=%g, eps=%g, l=%d, zero_ratios=%d\n", ms(t0, t1),
                asg.K, asg.C, asg.eps_N, asg.l, (int)asg.ratio_zero_count);
    for (size_t j = 0; j < asg.choice_residuals.size(); ++j)
        std::printf("  choice residual[j=%zu] = %g (budget %g)\n", j + 2,
                    asg.choice_residuals[j], 0.5 * rr);

    t0 = Clock::now();
    PiecewisePolyDiffeo g = PiecewisePolyDiffeo::identity();
    try {
        g = extend_to_diffeo(grid, asg, asg.K, default_config(), &p);
    } catch (const std::exception& e) {
        std::printf("extend FAILED: %s (%.1f ms)\n", e.what(), ms(t0, Clock::now()));
        return 1;
    }
    t1 = Clock::now();
    std::printf("extend: %.1f ms, pieces=%zu\n", ms(t0, t1), g.breakpoints().size() - 1);

    t0 = Clock::now();
    const auto rep = verify_root(p, g, N, k, rr);
    t1 = Clock::now();
    std::printf("verify: %.1f ms\n", ms(t0, t1));
    std::printf("  c0=%.6g (p1=%d)  low=%.6g (p2=%d)  int=%.6g (p3=%d)  ck=%.6g (p4=%d)\n",
                rep.c0_residual, rep.pass1, rep.low_order_norm, rep.pass2, rep.interior_sup,
                rep.pass3, rep.ck_residual, rep.pass4);
    std::printf("  grid residual=%.3e over %d pts (ok=%d)  pass=%d\n", rep.grid_residual,
                rep.grid_points, rep.grid_ok, rep.pass);
    return 0;
}
