#include "savo/features.hpp"

#include <algorithm>
#include <vector>

namespace savo::features {

namespace {

void require_glyph_dims(const BinaryImage& g) {
    if (g.width() != kGlyphSize || g.height() != kGlyphSize) {
        throw Error(ErrorCode::BadDims, "glyph must be 40x40");
    }
}

// Cells of scan line `line` for family f (0 rows, 1 cols, 2 main diagonals x - y + 39,
// 3 anti-diagonals x + y), in scan order.
template <typename Fn>
void for_each_cell(int family, int line, Fn&& fn) {
    const int n = kGlyphSize;
    switch (family) {
        case 0:
            for (int x = 0; x < n; ++x) fn(x, line);
            break;
        case 1:
            for (int y = 0; y < n; ++y) fn(line, y);
            break;
        case 2:
            for (int y = 0; y < n; ++y) {
                const int x = line - (n - 1) + y;
                if (x >= 0 && x < n) fn(x, y);
            }
            break;
        default:
            for (int y = 0; y < n; ++y) {
                const int x = line - y;
                if (x >= 0 && x < n) fn(x, y);
            }
            break;
    }
}

template <typename LineFn>
std::array<double, kFamilyLength> scan_families(LineFn&& per_line) {
    std::array<double, kFamilyLength> out{};
    for (int family = 0; family < 4; ++family) {
        const int lines = family < 2 ? kGlyphSize : kDiagonals;
        for (int line = 0; line < lines; ++line) {
            const int bin = family < 2 ? line : diagonal_bin(line);
            out[static_cast<std::size_t>(family * kGlyphSize + bin)] += per_line(family, line);
        }
    }
    return out;
}

}  // namespace

BinaryImage normalize_glyph(const BinaryImage& img) {
    const Box box = imaging::ink_bbox(img);
    if (box.empty()) throw Error(ErrorCode::NoInk, "glyph has no ink");
    return imaging::resize_nearest(imaging::crop(img, box), kGlyphSize, kGlyphSize);
}

BinaryImage normalize_glyph(const script::GlyphSegment& seg) {
    Box box = imaging::ink_bbox(seg.crop);
    if (box.empty()) throw Error(ErrorCode::NoInk, "segment has no ink");
    box.x0 += seg.x0;
    box.x1 += seg.x0;
    for (const auto& d : seg.diacritics) {
        box.x0 = std::min(box.x0, d.component.bbox.x0);
        box.y0 = std::min(box.y0, d.component.bbox.y0);
        box.x1 = std::max(box.x1, d.component.bbox.x1);
        box.y1 = std::max(box.y1, d.component.bbox.y1);
    }
    BinaryImage canvas(box.width(), box.height());
    for (int y = 0; y < seg.crop.height(); ++y) {
        for (int x = 0; x < seg.crop.width(); ++x) {
            if (seg.crop.at(x, y)) canvas.at(seg.x0 + x - box.x0, y - box.y0) = 1;
        }
    }
    for (const auto& d : seg.diacritics) {
        for (const auto& p : d.component.pixels) canvas.at(p.x - box.x0, p.y - box.y0) = 1;
    }
    return imaging::resize_nearest(canvas, kGlyphSize, kGlyphSize);
}

std::array<double, kFamilyLength> projection_features(const BinaryImage& glyph) {
    require_glyph_dims(glyph);
    return scan_families([&](int family, int line) {
        double count = 0.0;
        for_each_cell(family, line, [&](int x, int y) { count += glyph.at(x, y) ? 1.0 : 0.0; });
        return count;
    });
}

std::array<double, kFamilyLength> transition_features(const BinaryImage& glyph) {
    require_glyph_dims(glyph);
    return scan_families([&](int family, int line) {
        double count = 0.0;
        bool prev = false;
        for_each_cell(family, line, [&](int x, int y) {
            const bool cur = glyph.at(x, y) != 0;
            if (cur && !prev) count += 1.0;
            prev = cur;
        });
        return count;
    });
}

int occlusion_count(const BinaryImage& glyph) {
    require_glyph_dims(glyph);
    const int n = kGlyphSize;
    std::vector<int> seen(static_cast<std::size_t>(n * n), 0);
    std::vector<Point> stack;
    auto flood = [&](int sx, int sy) {
        bool touches_border = false;
        stack.push_back({sx, sy});
        seen[static_cast<std::size_t>(sy * n + sx)] = 1;
        while (!stack.empty()) {
            const Point p = stack.back();
            stack.pop_back();
            if (p.x == 0 || p.y == 0 || p.x == n - 1 || p.y == n - 1) touches_border = true;
            const Point nbrs[4] = {{p.x + 1, p.y}, {p.x - 1, p.y}, {p.x, p.y + 1}, {p.x, p.y - 1}};
            for (const auto& q : nbrs) {
                if (q.x < 0 || q.y < 0 || q.x >= n || q.y >= n) continue;
                auto& s = seen[static_cast<std::size_t>(q.y * n + q.x)];
                if (s || glyph.at(q.x, q.y)) continue;
                s = 1;
                stack.push_back(q);
            }
        }
        return touches_border;
    };
    int holes = 0;
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            if (glyph.at(x, y) || seen[static_cast<std::size_t>(y * n + x)]) continue;
            if (!flood(x, y)) ++holes;
        }
    }
    return holes;
}

std::array<double, 2> diacritic_descriptor(const script::GlyphSegment& seg) {
    std::array<double, 2> out{};
    for (const auto& d : seg.diacritics) {
        out[d.position == script::MarkPosition::Above ? 0 : 1] += 1.0;
    }
    return out;
}

GlyphFeatureVector extract_features(const script::GlyphSegment& seg) {
    const BinaryImage g = normalize_glyph(seg);
    GlyphFeatureVector v{};
    const auto proj = projection_features(g);
    const auto trans = transition_features(g);
    std::copy(proj.begin(), proj.end(), v.begin());
    std::copy(trans.begin(), trans.end(), v.begin() + kFamilyLength);
    v[2 * kFamilyLength] = occlusion_count(g);
    const auto marks = diacritic_descriptor(seg);
    v[2 * kFamilyLength + 1] = marks[0];
    v[2 * kFamilyLength + 2] = marks[1];
    return v;
}

}  // namespace savo::features
