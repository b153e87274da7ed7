#include "lvb/error.hpp"

namespace lvb {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Domain: return "DomainError";
    case ErrorCode::Overflow: return "OverflowError";
    case ErrorCode::BarrierCrossing: return "BarrierCrossing";
    case ErrorCode::NonpositiveBarrier: return "NonpositiveBarrier";
    case ErrorCode::NonpositiveMaturity: return "NonpositiveMaturity";
    case ErrorCode::InvalidContract: return "InvalidContract";
    case ErrorCode::SpotOutsideCorridor: return "SpotOutsideCorridor";
    case ErrorCode::ProfileMismatch: return "ProfileMismatch";
    case ErrorCode::UnsupportedConfiguration: return "UnsupportedConfiguration";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::AssemblyFailure: return "AssemblyFailure";
    case ErrorCode::SingularDiagonal: return "SingularDiagonal";
    case ErrorCode::DeterminantVanishing: return "DeterminantVanishing";
    case ErrorCode::InversionUnstable: return "InversionUnstable";
    }
    return "UnknownError";
}

bool is_validation_error(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::BarrierCrossing:
    case ErrorCode::NonpositiveBarrier:
    case ErrorCode::NonpositiveMaturity:
    case ErrorCode::InvalidContract:
    case ErrorCode::SpotOutsideCorridor:
    case ErrorCode::ProfileMismatch:
    case ErrorCode::UnsupportedConfiguration:
    case ErrorCode::Domain:
        return true;
    default:
        return false;
    }
}

} // namespace lvb
