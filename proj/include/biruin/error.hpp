#pragma once

#include <stdexcept>
#include <string>

namespace biruin {

enum class ErrorCode {
    ArityMismatch,
    NonConvergent,
    DegreeViolation,
    RootOnAxis,
    NotStable,
    CountMismatch,
    BoundFailure,
    InversionNonConvergent,
    UnsampleableModel,
    LevelOutOfRange,
    ShapeMismatch,
    InvalidSpec,
    InvalidArgument,
    ConfigError,
    IoError,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::DegreeViolation: return "DegreeViolation";
    case ErrorCode::RootOnAxis: return "RootOnAxis";
    case ErrorCode::NotStable: return "NotStable";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::BoundFailure: return "BoundFailure";
    case ErrorCode::InversionNonConvergent: return "InversionNonConvergent";
    case ErrorCode::UnsampleableModel: return "UnsampleableModel";
    case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Error";
}

}  // namespace biruin
