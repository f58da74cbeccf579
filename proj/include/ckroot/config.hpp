#pragma once

// Shared numeric configuration.  All operations are pure functions of their
// inputs plus a Config value; the defaults below are the documented contract
// values, and every tolerance that shows up in a report is taken from here.

namespace ckroot {

struct Config {
    // Sup norms are sampled on a uniform grid of this many points per unit
    // length, with one Newton refinement at each per-order argmax.
    int sample_density = 10'000;

    // Per-piece representation degree bound used when composing exactly;
    // beyond it a piece is re-approximated by two-point Hermite data.
    int degree_budget = 24;

    // Piece-count budget for composition results; beyond it the result is
    // resampled onto a thinned breakpoint grid and flagged.
    int piece_budget = 4096;

    // Derivative orders above this are rejected as OrderTooHigh.
    int max_derivative_order = 64;

    // Interior-breakpoint continuity tolerance for derivative data.
    double continuity_tol = 1e-9;

    // Minimum admissible spacing between consecutive grid/breakpoint values.
    double min_spacing = 1e-14;

    // Inversion: target residual |f(f_inv(y)) - y| at subdivision midpoints.
    double invert_tol = 1e-12;

    // Value-residual target for re-approximated composition pieces; pieces
    // exceeding it are bisected until they comply or hit the depth cap.
    double compose_tol = 1e-12;

    // Flatness / fixed-point detection tolerances for analyze().
    double flat_tol = 1e-9;
    double fixed_point_tol = 1e-12;
    double sign_tol = 1e-12;

    // Support detection threshold: |f(x) - x| above this marks support.
    double support_tol = 1e-10;

    // Root pipeline: starting iteration order, cap, and perturbation size.
    int root_N0 = 16;
    int root_N_cap = 1 << 14;

    // Anchor selection keeps extending the orbit until the anchor count
    // exceeds this multiple of the estimated quasi-monotone degree of f'.
    int anchor_l_multiple = 4;
    // Hard cap on the anchor orbit length.
    int anchor_cap = 200'000;

    // Monotone-derivative check tolerance (absolute part); the relative part
    // is taken against the per-piece derivative increment.
    double monotone_tol = 1e-9;

    // Samples per subinterval when checking per-piece derivative shape.
    int piece_check_samples = 20;

    // Stage harness: caps for conjugation-exponent searches.
    int stage_p_cap = 512;
    int stage_m_cap = 16;
    int stage_cap = 4;

    double rng_seed = 0;
};

inline const Config& default_config() {
    static const Config cfg{};
    return cfg;
}

}  // namespace ckroot
