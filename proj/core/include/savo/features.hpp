#pragma once

#include <array>
#include <string>

#include "savo/image.hpp"
#include "savo/script.hpp"

namespace savo::features {

inline constexpr int kGlyphSize = 40;
inline constexpr int kDiagonals = 2 * kGlyphSize - 1;  // 79
inline constexpr std::size_t kFamilyLength = 160;
inline constexpr std::size_t kFeatureLength = 323;

/// Layout: [0,160) projections, [160,320) transitions, 320 occlusions,
/// 321 marks above, 322 marks below.
using GlyphFeatureVector = std::array<double, kFeatureLength>;

/// Segment body plus its attached diacritics, cropped to the ink box and resized to 40x40.
BinaryImage normalize_glyph(const script::GlyphSegment& seg);
/// Same for a bare binary image.
BinaryImage normalize_glyph(const BinaryImage& img);

/// Diagonal d (0..78) falls in bin floor(d * 40 / 79).
constexpr int diagonal_bin(int d) noexcept { return d * kGlyphSize / kDiagonals; }

/// Horizontal, vertical, main-diagonal and anti-diagonal ink counts, 40 bins each.
std::array<double, kFamilyLength> projection_features(const BinaryImage& glyph);

/// 0 -> 1 transitions along the same four scan families, with an implicit leading 0.
std::array<double, kFamilyLength> transition_features(const BinaryImage& glyph);

/// Background components (4-connected) that do not touch the border.
int occlusion_count(const BinaryImage& glyph);

/// Attached diacritics above and below.
std::array<double, 2> diacritic_descriptor(const script::GlyphSegment& seg);

GlyphFeatureVector extract_features(const script::GlyphSegment& seg);

}  // namespace savo::features
