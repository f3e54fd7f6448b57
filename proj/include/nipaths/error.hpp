#pragma once

#include <stdexcept>
#include <string>

namespace nipaths {

enum class ErrorCode {
    InvalidParams,
    StartNotAtZero,
    StartsNotIncreasing,
    EndsNotIncreasing,
    EndpointsTooHigh,
    ParameterOutOfRange,
    IndexError,
    InvalidConfig,
    DegenerateBeta,
    NotEqualSpacing,
    GammaOutOfRange,
    DuplicatePoints,
    ZeroGauge,
    EndpointsNotPacked,
    InconsistentTiling,
    StateSpaceTooLarge,
    SingularTerm,
    NoConvergence,
    ImaginaryResidue,
    SingularGramm,
};

const char* error_name(ErrorCode code);

// Errors caused by bad numerics rather than bad inputs.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code)
    {
    }

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace nipaths
