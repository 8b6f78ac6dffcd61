#include "savo/error.hpp"

namespace savo {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ImageTooSmall: return "ImageTooSmall";
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::BadFactor: return "BadFactor";
        case ErrorCode::BadTarget: return "BadTarget";
        case ErrorCode::BadArgument: return "BadArgument";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::DegenerateClusters: return "DegenerateClusters";
        case ErrorCode::BadK: return "BadK";
        case ErrorCode::TooFewMembers: return "TooFewMembers";
        case ErrorCode::NoEligibleCluster: return "NoEligibleCluster";
        case ErrorCode::EmptyBand: return "EmptyBand";
        case ErrorCode::BadInputLength: return "BadInputLength";
        case ErrorCode::DegenerateData: return "DegenerateData";
        case ErrorCode::RegionTooSmall: return "RegionTooSmall";
        case ErrorCode::BadFuzzifier: return "BadFuzzifier";
        case ErrorCode::NoInk: return "NoInk";
        case ErrorCode::BadDims: return "BadDims";
        case ErrorCode::EmptyStore: return "EmptyStore";
        case ErrorCode::EmptySegments: return "EmptySegments";
        case ErrorCode::MissingGlyph: return "MissingGlyph";
        case ErrorCode::MalformedInput: return "MalformedInput";
        case ErrorCode::UnalignedIds: return "UnalignedIds";
        case ErrorCode::MissingModel: return "MissingModel";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace savo
