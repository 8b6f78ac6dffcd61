#include "savo/script.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace savo::script {

namespace {

bool has_ink(const BinaryImage& img) {
    return std::any_of(img.pixels().begin(), img.pixels().end(), [](auto v) { return v != 0; });
}

BinaryImage column_slice(const BinaryImage& img, int x0, int x1) {
    return imaging::crop(img, Box{x0, 0, x1, img.height() - 1});
}

BinaryImage hconcat(const BinaryImage& left, const BinaryImage& right) {
    BinaryImage out(left.width() + right.width(), left.height());
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < left.width(); ++x) out.at(x, y) = left.at(x, y);
        for (int x = 0; x < right.width(); ++x) out.at(left.width() + x, y) = right.at(x, y);
    }
    return out;
}

/// `right` and `left` are neighbours in reading order (right precedes left).
GlyphSegment merge_pair(const GlyphSegment& right, const GlyphSegment& left) {
    GlyphSegment m;
    m.x0 = left.x0;
    m.x1 = right.x1;
    m.crop = hconcat(left.crop, right.crop);
    m.diacritics = right.diacritics;
    m.diacritics.insert(m.diacritics.end(), left.diacritics.begin(), left.diacritics.end());
    m.merge_count = right.merge_count + left.merge_count + 1;
    m.joined_right = right.joined_right;
    m.joined_left = left.joined_left;
    return m;
}

}  // namespace

int detect_baseline(const BinaryImage& line) {
    const auto proj = imaging::horizontal_projection(line);
    int best = -1;
    int best_count = 0;
    for (int y = 0; y < static_cast<int>(proj.size()); ++y) {
        if (proj[static_cast<std::size_t>(y)] > 0 && proj[static_cast<std::size_t>(y)] >= best_count) {
            best_count = proj[static_cast<std::size_t>(y)];
            best = y;
        }
    }
    if (best < 0) throw Error(ErrorCode::NoInk, "line has no ink");
    return best;
}

BaselineBand baseline_band(int baseline, int line_height, double ratio) {
    const int half = std::max(1, static_cast<int>(std::floor(ratio * line_height)));
    return BaselineBand{std::max(0, baseline - half), std::min(line_height - 1, baseline + half)};
}

DiacriticSplit split_diacritics(const BinaryImage& line, int baseline, const SegmentationConfig& config) {
    auto comps = imaging::connected_components(line);
    if (comps.empty()) throw Error(ErrorCode::NoInk, "line has no ink");
    const int h = line.height();
    const BaselineBand band = baseline_band(baseline, h, config.baseline_band_ratio);
    int largest = 0;
    for (const auto& c : comps) largest = std::max(largest, c.pixel_count());
    const double max_area = config.diacritic_area_ratio * static_cast<double>(h) * h;
    const double max_pixels = config.diacritic_pixel_ratio * largest;

    DiacriticSplit out;
    out.body = BinaryImage(line.width(), h);
    for (auto& c : comps) {
        const bool small = static_cast<double>(c.bbox.area()) < max_area && c.pixel_count() < max_pixels;
        const bool above = c.bbox.y1 < band.top;
        const bool below = c.bbox.y0 > band.bottom;
        if (small && (above || below)) {
            out.diacritics.push_back(DiacriticMark{std::move(c), above ? MarkPosition::Above : MarkPosition::Below});
            continue;
        }
        for (const auto& p : c.pixels) out.body.at(p.x, p.y) = 1;
        out.body_components.push_back(std::move(c));
    }
    return out;
}

std::vector<GlyphSegment> segment_line(const BinaryImage& body, int baseline, const SegmentationConfig& config) {
    if (!has_ink(body)) throw Error(ErrorCode::NoInk, "line body has no ink");
    const int w = body.width();
    const int h = body.height();
    const BaselineBand band = baseline_band(baseline, h, config.baseline_band_ratio);
    const auto proj = imaging::vertical_projection(body);

    // T-junction test: every ink pixel of the column lies inside the baseline band.
    std::vector<bool> band_only(static_cast<std::size_t>(w), false);
    std::vector<int> band_only_proj;
    for (int x = 0; x < w; ++x) {
        if (proj[static_cast<std::size_t>(x)] == 0) continue;
        bool inside = true;
        for (int y = 0; y < h && inside; ++y) inside = !body.at(x, y) || band.contains(y);
        band_only[static_cast<std::size_t>(x)] = inside;
        if (inside) band_only_proj.push_back(proj[static_cast<std::size_t>(x)]);
    }
    int stroke = -1;
    if (!band_only_proj.empty()) {
        std::nth_element(band_only_proj.begin(), band_only_proj.begin() + band_only_proj.size() / 2,
                         band_only_proj.end());
        stroke = band_only_proj[band_only_proj.size() / 2];
    }
    auto valley = [&](int x) {
        return stroke > 0 && band_only[static_cast<std::size_t>(x)] &&
               std::abs(proj[static_cast<std::size_t>(x)] - stroke) <= config.valley_tolerance;
    };

    // Pieces in left-to-right order, with the kind of cut at each side.
    std::vector<GlyphSegment> pieces;
    int x = 0;
    while (x < w) {
        if (proj[static_cast<std::size_t>(x)] == 0) {
            ++x;
            continue;
        }
        int end = x;
        while (end + 1 < w && proj[static_cast<std::size_t>(end + 1)] > 0) ++end;

        std::vector<int> cuts;  // first column of the left-hand piece's right neighbour
        int c = x;
        while (c <= end) {
            if (!valley(c)) {
                ++c;
                continue;
            }
            int r = c;
            while (r + 1 <= end && valley(r + 1)) ++r;
            if (c > x && r < end && r - c + 1 >= config.min_ligature_run) cuts.push_back(c + (r - c + 1) / 2);
            c = r + 1;
        }
        int start = x;
        for (std::size_t i = 0; i <= cuts.size(); ++i) {
            const int stop = i < cuts.size() ? cuts[i] - 1 : end;
            GlyphSegment seg;
            seg.x0 = start;
            seg.x1 = stop;
            seg.crop = column_slice(body, start, stop);
            seg.joined_left = start != x;
            seg.joined_right = i < cuts.size();
            pieces.push_back(std::move(seg));
            start = stop + 1;
        }
        x = end + 1;
    }
    std::reverse(pieces.begin(), pieces.end());
    return pieces;
}

std::vector<GlyphSegment> correct_segments(std::vector<GlyphSegment> segments,
                                           std::span<const DiacriticMark> diacritics,
                                           const SegmentationConfig& config) {
    if (segments.empty()) return segments;
    for (auto& s : segments) s.diacritics.clear();

    for (const auto& d : diacritics) {
        const double cx = 0.5 * (d.component.bbox.x0 + d.component.bbox.x1);
        std::size_t best = 0;
        double best_gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < segments.size(); ++i) {
            const double lo = segments[i].x0 - 0.5;
            const double hi = segments[i].x1 + 0.5;
            const double gap = cx < lo ? lo - cx : (cx > hi ? cx - hi : 0.0);
            if (gap < best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        segments[best].diacritics.push_back(d);
    }

    const int height = segments.front().crop.height();
    const double narrow = config.narrow_ratio * height;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < segments.size() && !changed; ++i) {
            const auto& s = segments[i];
            if (s.width() >= narrow || !s.diacritics.empty()) continue;
            if (s.joined_left && i + 1 < segments.size()) {
                if (s.merge_count + segments[i + 1].merge_count + 1 <= config.max_merges) {
                    segments[i] = merge_pair(s, segments[i + 1]);
                    segments.erase(segments.begin() + static_cast<std::ptrdiff_t>(i) + 1);
                    changed = true;
                }
            } else if (!s.joined_left && s.joined_right && i > 0) {
                if (s.merge_count + segments[i - 1].merge_count + 1 <= config.max_merges) {
                    segments[i - 1] = merge_pair(segments[i - 1], s);
                    segments.erase(segments.begin() + static_cast<std::ptrdiff_t>(i));
                    changed = true;
                }
            }
        }
    }
    return segments;
}

LineAnalysis analyze_line(const BinaryImage& line, const SegmentationConfig& config) {
    LineAnalysis a;
    a.height = line.height();
    a.baseline = detect_baseline(line);
    DiacriticSplit split = split_diacritics(line, a.baseline, config);
    a.diacritics = std::move(split.diacritics);
    a.segments = correct_segments(segment_line(split.body, a.baseline, config), a.diacritics, config);
    return a;
}

}  // namespace savo::script
