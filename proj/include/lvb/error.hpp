#pragma once

#include <stdexcept>
#include <string>

namespace lvb {

enum class ErrorCode {
    Domain,
    Overflow,
    BarrierCrossing,
    NonpositiveBarrier,
    NonpositiveMaturity,
    InvalidContract,
    SpotOutsideCorridor,
    ProfileMismatch,
    UnsupportedConfiguration,
    QuadratureFailure,
    AssemblyFailure,
    SingularDiagonal,
    DeterminantVanishing,
    InversionUnstable,
};

const char* to_string(ErrorCode code) noexcept;

// Validation errors are caused by bad inputs; everything else is numerical.
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

#define LVB_REQUIRE(cond, code, msg)                 \
    do {                                             \
        if (!(cond)) throw ::lvb::Error((code), (msg)); \
    } while (false)

} // namespace lvb
