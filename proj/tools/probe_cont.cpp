// Scratch: replicate the extension assembly and measure per-order continuity
// gaps of the raw Hermite build (loose tolerance so construction succeeds).
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
    DerivativeAssignment asg = assign_derivatives(grid, table, targets, k, rr, default_config(), eps);

    const std::size_t nodes = grid.node_count();
    const std::size_t width = std::size_t(k) + 2;
    std::vector<double> xs;
    std::vector<std::vector<double>> data;
    std::vector<double> id_row(width, 0.0);
    id_row[1] = 1.0;
    xs.push_back(0.0);
    data.push_back(id_row);
    for (std::size_t i = 0; i < nodes; ++i) {
        xs.push_back(grid.z[i]);
        std::vector<double> row(width, 0.0);
        row[0] = grid.z[i + 1];
        for (int j = 1; j <= k + 1; ++j) row[(size_t)j] = asg.derivs[(size_t)j][i];
        data.push_back(row);
    }
    id_row[0] = 1.0;
    xs.push_back(1.0);
    data.push_back(id_row);

    Config loose = default_config();
    loose.continuity_tol = 1e300;
    PiecewisePolyDiffeo g = PiecewisePolyDiffeo::from_hermite_data(xs, data, k + 1, loose);
    for (int j = 0; j <= k + 1; ++j)
        std::printf("order %d: continuity gap = %.3e\n", j, g.continuity_gap(j));

    // locate the worst interior breakpoint per order
    const auto& br = g.breakpoints();
    const auto& pc = g.pieces();
    for (int j = 1; j <= k + 1; ++j) {
        double worst = 0.0;
        std::size_t wi = 0;
        double wl = 0, wr = 0;
        for (std::size_t i = 1; i + 1 < br.size(); ++i) {
            const double t = br[i];
            const double L = pc[i - 1].derivative_at(t - br[i - 1], j);
            const double R = pc[i].derivative_at(0.0, j);
            const double sc = std::max(1.0, std::max(std::abs(L), std::abs(R)));
            const double gap = std::abs(L - R) / sc;
            if (gap > worst) { worst = gap; wi = i; wl = L; wr = R; }
        }
        std::printf(
            "order %d worst: i=%zu x=%.6g left=%.6e right=%.6e relgap=%.3e  widths %.3e|%.3e\n",
            j, wi, br[wi], wl, wr, worst, br[wi] - br[wi - 1], br[wi + 1] - br[wi]);
    }
    return 0;
}
