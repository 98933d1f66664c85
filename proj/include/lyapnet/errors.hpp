#pragma once

#include <stdexcept>
#include <string>

namespace lyapnet {

// Stable numeric codes shared with the C API and the CLI exit-code mapping.
enum class ErrorCode : int {
    Ok = 0,
    InvalidArgument = 1,
    Config = 2,
    NumericalBlowup = 3,
    DegenerateBasis = 4,
    SingularSystem = 5,
    NoConvergence = 6,
    TrajectoryTooShort = 7,
    DegenerateRange = 8,
    LengthMismatch = 9,
    EmptySpectrum = 10,
    Io = 11,
    Unknown = 12,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

#define LYAPNET_DEFINE_ERROR(NAME)                                  \
    class NAME : public Error {                                     \
    public:                                                         \
        explicit NAME(const std::string& what)                      \
            : Error(ErrorCode::NAME, what) {}                       \
    }

LYAPNET_DEFINE_ERROR(InvalidArgument);
LYAPNET_DEFINE_ERROR(Config);
LYAPNET_DEFINE_ERROR(NumericalBlowup);
LYAPNET_DEFINE_ERROR(DegenerateBasis);
LYAPNET_DEFINE_ERROR(SingularSystem);
LYAPNET_DEFINE_ERROR(NoConvergence);
LYAPNET_DEFINE_ERROR(TrajectoryTooShort);
LYAPNET_DEFINE_ERROR(DegenerateRange);
LYAPNET_DEFINE_ERROR(LengthMismatch);
LYAPNET_DEFINE_ERROR(EmptySpectrum);
LYAPNET_DEFINE_ERROR(Io);

#undef LYAPNET_DEFINE_ERROR

}  // namespace lyapnet
