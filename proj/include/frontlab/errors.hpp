#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace frontlab {

enum class ErrorCode {
    // graph construction and transforms
    InvalidDocument,
    DuplicateId,
    DanglingReference,
    DisconnectedCenter,
    NonpositiveLength,
    FewerThanTwoOuterPaths,
    InvalidSplicePoint,
    ReattachmentIncomplete,
    IndexCollision,
    NonpositiveOffset,
    UnknownEdgeId,
    // nonlinearity and ODE objects
    UnbalancedNonlinearity,
    InvalidNonlinearity,
    OutOfRange,
    NoConvergence,
    RadiusTooSmall,
    // discretization and time stepping
    SpacingTooCoarse,
    LinearSolveFailure,
    OffsetOutOfRange,
    NoSteadyState,
    BoundViolation,
    UnknownEdge,
    InvalidInitialClass,
    // stationary and spectral problems
    EmptyBoundary,
    SingularSystem,
    IncompatibleFlux,
    NotBlocking,
    ConvergenceFailure,
    // scenarios
    ConditionUnsatisfiable,
    HypothesisUnmet,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace frontlab
