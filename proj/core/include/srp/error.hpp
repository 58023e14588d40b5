#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace srp {

enum class ErrorCode {
    InvalidArgument,
    NonPositiveArgument,
    LengthNotDivisible,
    WindowTooLong,
    UnknownType,
    UnknownAppliance,
    MissingMetadata,
    EmptyDirectory,
    TooShort,
    DidNotConverge,
    ShapeMismatch,
    ChannelCountNotAlpha,
    NonFiniteLoss,
    VersionMismatch,
    CorruptFile,
    LengthMismatch,
    EmptyInput,
    EmptyTrainingSet,
    SingleClass,
    Io,
    Config,
    MissingArtifact,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class DidNotConverge : public Error {
public:
    DidNotConverge(double residual, int iterations);

    [[nodiscard]] double residual() const noexcept { return residual_; }
    [[nodiscard]] int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

inline void require(bool condition, ErrorCode code, const std::string& what) {
    if (!condition) raise(code, what);
}

}  // namespace srp
