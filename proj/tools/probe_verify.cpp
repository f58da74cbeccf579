// Scratch: per-order diagnostics of the extension's interior derivatives and
// the composite-vs-target distance, with argmax locations.
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "ckroot/rootk.hpp"

using namespace ckroot;

int main(int argc, char** argv) {
    const double c = argc > 1 ? std::atof(argv[1]) : 0.05;
    const int k = argc > 2 ? std::atoi(argv[2]) : 2;
    const double r = argc > 3 ? std::atof(argv[3]) : 0.5;
    const int N = argc > 4 ? std::atoi(argv[4]) : 16;

    const auto f = PiecewisePolyDiffeo::flat_bump(c, k);
    const auto p = flatten_to_polynomial(f, k, r);
    const double rr = 0.7 * r;
    AnchorSet anchors = select_anchors(p, rr, k);
    const auto grid = build_grid(p, anchors, N);
    const auto table = finite_difference_table(grid, k);
    std::vector<std::vector<double>> targets((size_t)k + 2);
    for (int j = 0; j <= k + 1; ++j) {
        targets[(size_t)j].resize(grid.node_count());
        for (size_t i = 0; i < grid.node_count(); ++i)
            targets[(size_t)j][i] = p.evaluate(grid.z[i], j);
    }
    double min_gap = 1.0;
    for (size_t i = 0; i + 1 < grid.z.size(); ++i)
        min_gap = std::min(min_gap, grid.z[i + 1] - grid.z[i]);
    const double eps = std::min(1.0 / (double(N) * N), 0.03 * min_gap);
    DerivativeAssignment asg =
        assign_derivatives(grid, table, targets, k, rr, default_config(), eps);
    PiecewisePolyDiffeo g = extend_to_diffeo(grid, asg, asg.K);

    std::printf("orbit zone: [%.9g, %.9g], nodes=%zu\n", grid.z.front(),
                grid.z[grid.node_count() - 1], grid.node_count());

    // per-order interior sup of |g^(s)|, sampled densely per piece
    const auto& br = g.breakpoints();
    for (int s = 2; s <= k; ++s) {
        double sup = 0.0, ax = 0.0;
        for (std::size_t i = 0; i + 1 < br.size(); ++i) {
            for (int q = 0; q <= 32; ++q) {
                const double x = br[i] + (br[i + 1] - br[i]) * q / 32.0;
                const double v = std::abs(g.evaluate(x, s));
                if (v > sup) { sup = v; ax = x; }
            }
        }
        std::printf("sup |g^(%d)| = %.6g at x=%.9g\n", s, sup, ax);
    }

    // composite vs target per order on the standard sample grid
    std::vector<double> samples = detail::norm_sample_grid(p, g, default_config());
    std::printf("samples: %zu\n", samples.size());
    for (int j = 0; j <= k; ++j) {
        double sup = 0.0, ax = 0.0;
        for (double x : samples) {
            const Jet jn = iterate_jet(g, x, N, k);
            const Jet jf = p.jet_at(x, k);
            const auto dn = jn.to_derivatives();
            const auto df = jf.to_derivatives();
            const double v = std::abs(dn[(size_t)j] - df[(size_t)j]);
            if (v > sup) { sup = v; ax = x; }
        }
        std::printf("order %d: sup |g^N - f| = %.6g at x=%.9g\n", j, sup, ax);
    }
    return 0;
}
