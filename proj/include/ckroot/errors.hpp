#pragma once

// Error taxonomy for the ckroot library.  Every failure mode thrown by the
// library carries a stable ErrorCode so callers (and the CLI) can react
// without parsing message strings.

#include <stdexcept>
#include <string>

namespace ckroot {

enum class ErrorCode {
    order_too_high,
    out_of_domain,
    degree_overflow,
    approximation_failed,
    not_increasing,
    invariant_violation,
    precondition_violated,
    solver_infeasible,
    no_crossing_direction,
    anchors_not_found,
    flatness_violation,
    interior_fixed_point,
    monotone_extension_failed,
    exhausted,
    dimension_mismatch,
    no_uniform_order,
    degenerate_family,
    blend_exceeds_budget,
    geometry_infeasible,
    unassigned_symbol,
    target_not_representable,
    stage_budget_exceeded,
    non_positive_charts,
    parse_error,
    io_error,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::order_too_high: return "OrderTooHigh";
        case ErrorCode::out_of_domain: return "OutOfDomain";
        case ErrorCode::degree_overflow: return "DegreeOverflow";
        case ErrorCode::approximation_failed: return "ApproximationFailed";
        case ErrorCode::not_increasing: return "NotIncreasing";
        case ErrorCode::invariant_violation: return "InvariantViolation";
        case ErrorCode::precondition_violated: return "PreconditionViolated";
        case ErrorCode::solver_infeasible: return "SolverInfeasible";
        case ErrorCode::no_crossing_direction: return "NoCrossingDirection";
        case ErrorCode::anchors_not_found: return "AnchorsNotFound";
        case ErrorCode::flatness_violation: return "FlatnessViolation";
        case ErrorCode::interior_fixed_point: return "InteriorFixedPoint";
        case ErrorCode::monotone_extension_failed: return "MonotoneExtensionFailed";
        case ErrorCode::exhausted: return "Exhausted";
        case ErrorCode::dimension_mismatch: return "DimensionMismatch";
        case ErrorCode::no_uniform_order: return "NoUniformOrder";
        case ErrorCode::degenerate_family: return "DegenerateFamily";
        case ErrorCode::blend_exceeds_budget: return "BlendExceedsBudget";
        case ErrorCode::geometry_infeasible: return "GeometryInfeasible";
        case ErrorCode::unassigned_symbol: return "UnassignedSymbol";
        case ErrorCode::target_not_representable: return "TargetNotRepresentable";
        case ErrorCode::stage_budget_exceeded: return "StageBudgetExceeded";
        case ErrorCode::non_positive_charts: return "NonPositiveCharts";
        case ErrorCode::parse_error: return "ParseError";
        case ErrorCode::io_error: return "IoError";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace ckroot
