#include "lyapnet/errors.hpp"

namespace lyapnet {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Ok: return "Ok";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Config: return "Config";
        case ErrorCode::NumericalBlowup: return "NumericalBlowup";
        case ErrorCode::DegenerateBasis: return "DegenerateBasis";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::TrajectoryTooShort: return "TrajectoryTooShort";
        case ErrorCode::DegenerateRange: return "DegenerateRange";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::EmptySpectrum: return "EmptySpectrum";
        case ErrorCode::Io: return "Io";
        case ErrorCode::Unknown: return "Unknown";
    }
    return "Unknown";
}

}  // namespace lyapnet
