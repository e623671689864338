#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zerosum {

enum class ErrorCode {
    ChainViolation,
    BadFactor,
    DimensionMismatch,
    ZeroElement,
    BadParams,
    NotABasis,
    CapExceeded,
    SyntaxError,
    GroupMismatch,
    NotZeroSum,
    NotMlMzss,
    BadWitness,
    MissingCosetCondition,
    BadLength,
};

inline std::string_view error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::ChainViolation: return "ChainViolation";
    case ErrorCode::BadFactor: return "BadFactor";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroElement: return "ZeroElement";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::NotABasis: return "NotABasis";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::GroupMismatch: return "GroupMismatch";
    case ErrorCode::NotZeroSum: return "NotZeroSum";
    case ErrorCode::NotMlMzss: return "NotMlMzss";
    case ErrorCode::BadWitness: return "BadWitness";
    case ErrorCode::MissingCosetCondition: return "MissingCosetCondition";
    case ErrorCode::BadLength: return "BadLength";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace zerosum
