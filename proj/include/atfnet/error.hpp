#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace atfnet {

enum class ErrorCode {
    InvalidInput,
    ImaginaryResidueTooLarge,
    NoDominantFrequency,
    ShapeMismatch,
    GradcheckFailure,
    PatchTooLong,
    CorruptCheckpoint,
    ConfigMismatch,
    ParseError,
    ConstantChannel,
    TooShort,
    EmptySplit,
    NonFiniteLoss,
    SingularDesign,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ImaginaryResidueTooLarge: return "ImaginaryResidueTooLarge";
    case ErrorCode::NoDominantFrequency: return "NoDominantFrequency";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::GradcheckFailure: return "GradcheckFailure";
    case ErrorCode::PatchTooLong: return "PatchTooLong";
    case ErrorCode::CorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConstantChannel: return "ConstantChannel";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

} // namespace atfnet
