#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace savo {

enum class ErrorCode {
    ImageTooSmall,
    OutOfBounds,
    BadFactor,
    BadTarget,
    BadArgument,
    EmptyInput,
    DimensionMismatch,
    TooFewPoints,
    DegenerateClusters,
    BadK,
    TooFewMembers,
    NoEligibleCluster,
    EmptyBand,
    BadInputLength,
    DegenerateData,
    RegionTooSmall,
    BadFuzzifier,
    NoInk,
    BadDims,
    EmptyStore,
    EmptySegments,
    MissingGlyph,
    MalformedInput,
    UnalignedIds,
    MissingModel,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace savo
