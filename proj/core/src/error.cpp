#include "srp/error.hpp"

namespace srp {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NonPositiveArgument: return "NonPositiveArgument";
        case ErrorCode::LengthNotDivisible: return "LengthNotDivisible";
        case ErrorCode::WindowTooLong: return "WindowTooLong";
        case ErrorCode::UnknownType: return "UnknownType";
        case ErrorCode::UnknownAppliance: return "UnknownAppliance";
        case ErrorCode::MissingMetadata: return "MissingMetadata";
        case ErrorCode::EmptyDirectory: return "EmptyDirectory";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::DidNotConverge: return "DidNotConverge";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::ChannelCountNotAlpha: return "ChannelCountNotAlpha";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::CorruptFile: return "CorruptFile";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
        case ErrorCode::SingleClass: return "SingleClass";
        case ErrorCode::Io: return "Io";
        case ErrorCode::Config: return "Config";
        case ErrorCode::MissingArtifact: return "MissingArtifact";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

DidNotConverge::DidNotConverge(double residual, int iterations)
    : Error(ErrorCode::DidNotConverge,
            "conjugate gradient stopped after " + std::to_string(iterations) +
                " iterations with gradient norm " + std::to_string(residual)),
      residual_(residual),
      iterations_(iterations) {}

void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace srp
