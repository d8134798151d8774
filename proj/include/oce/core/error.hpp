#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oce {

enum class Errc {
    BadMagic,
    TruncatedFile,
    ShapeMismatch,
    IoError,
    NonPositiveConcentration,
    ConfigInvalid,
    TooFewFrames,
    AllRowsMasked,
    IndexOutOfRange,
    NoWavefront,
    DegenerateTrack,
    TooFewPoints,
    DegenerateDesign,
    NoConvergence,
    InvalidSpec,
    NonFiniteLoss,
    BadCounts,
    UndefinedCorrelation,
    UsageError,
    ConfigError,
};

constexpr std::string_view errc_name(Errc code) noexcept
{
    switch (code) {
    case Errc::BadMagic: return "BadMagic";
    case Errc::TruncatedFile: return "TruncatedFile";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::IoError: return "IoError";
    case Errc::NonPositiveConcentration: return "NonPositiveConcentration";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::TooFewFrames: return "TooFewFrames";
    case Errc::AllRowsMasked: return "AllRowsMasked";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::NoWavefront: return "NoWavefront";
    case Errc::DegenerateTrack: return "DegenerateTrack";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::DegenerateDesign: return "DegenerateDesign";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::NonFiniteLoss: return "NonFiniteLoss";
    case Errc::BadCounts: return "BadCounts";
    case Errc::UndefinedCorrelation: return "UndefinedCorrelation";
    case Errc::UsageError: return "UsageError";
    case Errc::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

/// Every domain failure in the library is reported as an oce::Error carrying
/// a machine-readable code; what() holds a one-line human diagnostic.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code)
    {
    }

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace oce
