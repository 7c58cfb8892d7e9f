#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace barrier_repl {

enum class ErrorCode {
    DegenerateDiscriminant,
    BranchPoint,
    KernelPole,
    NonfiniteTerm,
    QuadratureFailure,
    ContourViolation,
    InvalidGrid,
    InvalidArgument,
    ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DegenerateDiscriminant: return "DegenerateDiscriminant";
        case ErrorCode::BranchPoint: return "BranchPoint";
        case ErrorCode::KernelPole: return "KernelPole";
        case ErrorCode::NonfiniteTerm: return "NonfiniteTerm";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::ContourViolation: return "ContourViolation";
        case ErrorCode::InvalidGrid: return "InvalidGrid";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

/// Library error carrying a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
    if (!condition) throw Error(code, what);
}

}  // namespace barrier_repl
