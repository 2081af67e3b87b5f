#include "frontlab/errors.hpp"

namespace frontlab {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidDocument: return "InvalidDocument";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::DanglingReference: return "DanglingReference";
        case ErrorCode::DisconnectedCenter: return "DisconnectedCenter";
        case ErrorCode::NonpositiveLength: return "NonpositiveLength";
        case ErrorCode::FewerThanTwoOuterPaths: return "FewerThanTwoOuterPaths";
        case ErrorCode::InvalidSplicePoint: return "InvalidSplicePoint";
        case ErrorCode::ReattachmentIncomplete: return "ReattachmentIncomplete";
        case ErrorCode::IndexCollision: return "IndexCollision";
        case ErrorCode::NonpositiveOffset: return "NonpositiveOffset";
        case ErrorCode::UnknownEdgeId: return "UnknownEdgeId";
        case ErrorCode::UnbalancedNonlinearity: return "UnbalancedNonlinearity";
        case ErrorCode::InvalidNonlinearity: return "InvalidNonlinearity";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::RadiusTooSmall: return "RadiusTooSmall";
        case ErrorCode::SpacingTooCoarse: return "SpacingTooCoarse";
        case ErrorCode::LinearSolveFailure: return "LinearSolveFailure";
        case ErrorCode::OffsetOutOfRange: return "OffsetOutOfRange";
        case ErrorCode::NoSteadyState: return "NoSteadyState";
        case ErrorCode::BoundViolation: return "BoundViolation";
        case ErrorCode::UnknownEdge: return "UnknownEdge";
        case ErrorCode::InvalidInitialClass: return "InvalidInitialClass";
        case ErrorCode::EmptyBoundary: return "EmptyBoundary";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::IncompatibleFlux: return "IncompatibleFlux";
        case ErrorCode::NotBlocking: return "NotBlocking";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::ConditionUnsatisfiable: return "ConditionUnsatisfiable";
        case ErrorCode::HypothesisUnmet: return "HypothesisUnmet";
    }
    return "Unknown";
}

}  // namespace frontlab
