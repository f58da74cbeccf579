// Scratch: replay the anchor-selection loop with per-attempt prints.
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "ckroot/rootk.hpp"

using namespace ckroot;

int main(int argc, char** argv) {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    const double c = argc > 1 ? std::atof(argv[1]) : 0.2;
    const int k = argc > 2 ? std::atoi(argv[2]) : 3;
    const double r_full = argc > 3 ? std::atof(argv[3]) : 0.5;
    const Config cfg = default_config();

    PiecewisePolyDiffeo f = PiecewisePolyDiffeo::flat_bump(c, k);
    PiecewisePolyDiffeo p = flatten_to_polynomial(f, k, r_full, cfg);
    const double r = 0.7 * r_full;

    const AnalysisReport an = analyze(p, std::min(k, p.smoothness_order()), cfg);
    std::printf("analyze: identity=%d dir=%d fpf=%d flat_order=%d\n", an.is_identity,
                an.direction, an.fixed_point_free, an.flat_order);
    const int jtop = std::min(k, an.flat_order);
    std::printf("jtop=%d gate=%g\n", jtop, 0.5 * r);

    double x0 = 0.45 * r;
    for (int attempt = 0; attempt < 12; ++attempt) {
        const double x1 = p(x0);
        std::printf("attempt %d: x0=%.6g x1-x0=%.3g", attempt, x0, x1 - x0);
        if (!(x1 > x0 + cfg.min_spacing)) {
            std::printf("  STALL\n");
            break;
        }
        const double head = detail::endpoint_window_sup(p, 0.0, x1, jtop);
        std::printf("  head=%.4g", head);
        if (head >= 0.5 * r) {
            std::printf("  HEAD-FAIL\n");
            x0 *= 0.5;
            continue;
        }
        const double tail_at_x1 = detail::endpoint_window_sup(p, x1, 1.0, jtop);
        std::printf("  tail@x1=%.4g", tail_at_x1);
        double y_star = x1;
        if (tail_at_x1 >= 0.5 * r) std::printf("  (bisect needed)");
        std::vector<double> xs{x0, x1};
        bool stalled = false;
        const auto advance = [&]() -> bool {
            const double nx = p(xs.back());
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
        const std::size_t after_reach = xs.size();
        while (!stalled &&
               detail::endpoint_window_sup(p, xs[xs.size() - 2], 1.0, jtop) >= 0.5 * r)
            if (!advance()) break;
        const std::size_t after_confirm = xs.size();
        int l = 1;
        long l_rounds = 0;
        while (!stalled) {
            std::vector<double> slope(xs.size());
            for (std::size_t i = 0; i < xs.size(); ++i) slope[i] = p.evaluate(xs[i], 1);
            l = quasi_monotone_degree(slope).degree;
            if (static_cast<int>(xs.size()) - 1 > cfg.anchor_l_multiple * l) break;
            if (++l_rounds > 3000) {
                std::printf("  [l-loop runaway: n=%zu l=%d]", xs.size() - 1, l);
                stalled = true;
                break;
            }
            if (!advance()) break;
        }
        std::printf("  reach=%zu confirm=%zu l_rounds=%ld", after_reach, after_confirm,
                    l_rounds);
        const double W = xs.back() - xs.front();
        std::printf("  stalled=%d n=%zu l=%d W=%.3g budget=%.3g\n", stalled, xs.size() - 1, l,
                    W, 0.8 / cfg.sample_density);
        if (stalled || (k >= 2 && W > 0.8 / cfg.sample_density)) {
            x0 *= 0.5;
            continue;
        }
        std::printf("SUCCESS n=%zu\n", xs.size() - 1);
        return 0;
    }
    std::printf("FAILED\n");
    return 1;
}
