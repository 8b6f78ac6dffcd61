#pragma once

#include <span>
#include <string>
#include <vector>

#include "savo/image.hpp"
#include "savo/imaging.hpp"

/// Cursive line segmentation: baseline, diacritic separation, vertical-projection cuts
/// guarded by a T-junction test, and rule-based repair of over-segmentation.
namespace savo::script {

using imaging::ConnectedComponent;

struct SegmentationConfig {
    /// Baseline band half-height as a fraction of line height.
    double baseline_band_ratio = 0.15;
    /// Diacritic candidates: bbox area below this fraction of height^2 ...
    double diacritic_area_ratio = 0.15;
    /// ... and pixel count below this fraction of the largest component.
    double diacritic_pixel_ratio = 0.10;
    /// Segments narrower than this fraction of line height are merge candidates.
    double narrow_ratio = 0.40;
    /// A band-only column is a ligature valley when |projection - stroke| <= tolerance.
    int valley_tolerance = 1;
    /// Minimum width of a valley run before it is cut.
    int min_ligature_run = 2;
    int max_merges = 2;
};

/// Row of maximal horizontal projection; ties go to the bottom-most row.
int detect_baseline(const BinaryImage& line);

struct BaselineBand {
    int top = 0;
    int bottom = 0;
    bool contains(int y) const noexcept { return y >= top && y <= bottom; }
};

BaselineBand baseline_band(int baseline, int line_height, double ratio);

enum class MarkPosition { Above, Below };

struct DiacriticMark {
    ConnectedComponent component;
    MarkPosition position = MarkPosition::Above;
};

struct DiacriticSplit {
    BinaryImage body;
    std::vector<ConnectedComponent> body_components;
    std::vector<DiacriticMark> diacritics;
};

DiacriticSplit split_diacritics(const BinaryImage& line, int baseline, const SegmentationConfig& config = {});

struct GlyphSegment {
    int x0 = 0;
    int x1 = -1;
    /// Body columns x0..x1 at full line height.
    BinaryImage crop;
    std::vector<DiacriticMark> diacritics;
    int merge_count = 0;
    /// Whether the cut on that side went through a ligature (as opposed to a blank gap).
    bool joined_right = false;
    bool joined_left = false;

    int width() const noexcept { return x1 - x0 + 1; }
};

/// Segments ordered right to left.
std::vector<GlyphSegment> segment_line(const BinaryImage& body, int baseline, const SegmentationConfig& config = {});

/// Attaches each diacritic to the segment under its horizontal centre, then merges
/// narrow diacritic-free pieces across ligature cuts: into the following (left)
/// segment, or into the previous one when the piece ends its sub-word. A segment
/// never accumulates more than `max_merges` merges.
std::vector<GlyphSegment> correct_segments(std::vector<GlyphSegment> segments,
                                           std::span<const DiacriticMark> diacritics,
                                           const SegmentationConfig& config = {});

struct LineAnalysis {
    int baseline = 0;
    int height = 0;
    std::vector<GlyphSegment> segments;
    std::vector<DiacriticMark> diacritics;
};

LineAnalysis analyze_line(const BinaryImage& line, const SegmentationConfig& config = {});

}  // namespace savo::script
