#include "savo/imaging.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace savo::imaging {

namespace {

constexpr double kGridHitEpsilon = 1e-9;

inline int clampi(int v, int lo, int hi) noexcept { return std::max(lo, std::min(hi, v)); }

}  // namespace

Hsv rgb_to_hsv(Rgb px) noexcept {
    const double r = px.r / 255.0;
    const double g = px.g / 255.0;
    const double b = px.b / 255.0;
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;

    Hsv out;
    out.v = mx;
    out.s = mx > 0.0 ? delta / mx : 0.0;
    if (delta <= 0.0) {
        out.h = 0.0;
        return out;
    }
    double h = 0.0;
    if (mx == r) {
        h = 60.0 * std::fmod((g - b) / delta, 6.0);
    } else if (mx == g) {
        h = 60.0 * ((b - r) / delta + 2.0);
    } else {
        h = 60.0 * ((r - g) / delta + 4.0);
    }
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    out.h = h;
    return out;
}

HsvImage rgb_to_hsv(const ColorImage& img) {
    HsvImage out(img.width(), img.height());
    auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = rgb_to_hsv(src[i]);
    return out;
}

GrayImage value_channel(const HsvImage& hsv) {
    GrayImage out(hsv.width(), hsv.height());
    auto src = hsv.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i].v * 255.0;
    return out;
}

GrayImage to_gray(const ColorImage& img) {
    GrayImage out(img.width(), img.height());
    auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = 0.299 * src[i].r + 0.587 * src[i].g + 0.114 * src[i].b;
    }
    return out;
}

GrayImage sobel_magnitude(const GrayImage& img) {
    const int w = img.width();
    const int h = img.height();
    if (w < 3 || h < 3) {
        throw Error(ErrorCode::ImageTooSmall, "sobel needs at least 3x3 pixels");
    }
    GrayImage out(w, h);
    auto px = [&](int x, int y) { return img.at(clampi(x, 0, w - 1), clampi(y, 0, h - 1)); };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
            const double gy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
            out.at(x, y) = std::min(255.0, std::sqrt(gx * gx + gy * gy));
        }
    }
    return out;
}

double interpolate_inverse_distance(const GrayImage& img, double x, double y) {
    if (img.empty() || !(x >= 0.0) || !(y >= 0.0) || x > img.width() - 1 || y > img.height() - 1) {
        throw Error(ErrorCode::OutOfBounds, "interpolation query outside image");
    }
    const int fx = static_cast<int>(std::floor(x));
    const int fy = static_cast<int>(std::floor(y));
    const int cx = std::min(fx + 1, img.width() - 1);
    const int cy = std::min(fy + 1, img.height() - 1);

    std::array<Point, 4> grid{Point{fx, fy}, Point{cx, fy}, Point{fx, cy}, Point{cx, cy}};
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point p = grid[i];
        bool seen = false;
        for (std::size_t j = 0; j < i; ++j) seen = seen || grid[j] == p;
        if (seen) continue;
        const double dx = x - p.x;
        const double dy = y - p.y;
        const double d = std::sqrt(dx * dx + dy * dy);
        if (d < kGridHitEpsilon) return img.at(p.x, p.y);
        const double wgt = 1.0 / d;
        num += wgt * img.at(p.x, p.y);
        den += wgt;
    }
    return num / den;
}

GrayImage upscale(const GrayImage& img, double factor) {
    if (!(factor >= 1.0) || !std::isfinite(factor)) {
        throw Error(ErrorCode::BadFactor, "upscale factor must be >= 1");
    }
    if (img.empty()) return img;
    const int ow = std::max(1, static_cast<int>(std::lround(img.width() * factor)));
    const int oh = std::max(1, static_cast<int>(std::lround(img.height() * factor)));
    if (ow == img.width() && oh == img.height()) return img;

    GrayImage out(ow, oh);
    const double sx = ow > 1 ? static_cast<double>(img.width() - 1) / (ow - 1) : 0.0;
    const double sy = oh > 1 ? static_cast<double>(img.height() - 1) / (oh - 1) : 0.0;
    for (int y = 0; y < oh; ++y) {
        const double src_y = std::min(y * sy, static_cast<double>(img.height() - 1));
        for (int x = 0; x < ow; ++x) {
            const double src_x = std::min(x * sx, static_cast<double>(img.width() - 1));
            out.at(x, y) = interpolate_inverse_distance(img, src_x, src_y);
        }
    }
    return out;
}

namespace {

template <typename T>
Raster<T> resize_nearest_impl(const Raster<T>& img, int cols, int rows) {
    if (cols < 1 || rows < 1) {
        throw Error(ErrorCode::BadTarget, "resize target must be at least 1x1");
    }
    if (img.empty()) {
        throw Error(ErrorCode::BadDims, "cannot resize an empty image");
    }
    const long src_rows = img.height();  // P
    const long src_cols = img.width();   // Q
    Raster<T> out(cols, rows);
    for (long i = 0; i < rows; ++i) {
        const int si = static_cast<int>((i * src_rows) / rows);
        for (long j = 0; j < cols; ++j) {
            const int sj = static_cast<int>((j * src_cols) / cols);
            out.at(static_cast<int>(j), static_cast<int>(i)) = img.at(sj, si);
        }
    }
    return out;
}

}  // namespace

GrayImage resize_nearest(const GrayImage& img, int cols, int rows) {
    return resize_nearest_impl(img, cols, rows);
}

BinaryImage resize_nearest(const BinaryImage& img, int cols, int rows) {
    return resize_nearest_impl(img, cols, rows);
}

std::vector<int> horizontal_projection(const BinaryImage& img) {
    std::vector<int> out(static_cast<std::size_t>(img.height()), 0);
    for (int y = 0; y < img.height(); ++y) {
        int count = 0;
        for (auto v : img.row(y)) count += v ? 1 : 0;
        out[static_cast<std::size_t>(y)] = count;
    }
    return out;
}

std::vector<int> vertical_projection(const BinaryImage& img) {
    std::vector<int> out(static_cast<std::size_t>(img.width()), 0);
    for (int y = 0; y < img.height(); ++y) {
        auto row = img.row(y);
        for (int x = 0; x < img.width(); ++x) out[static_cast<std::size_t>(x)] += row[x] ? 1 : 0;
    }
    return out;
}

std::vector<ConnectedComponent> connected_components(const BinaryImage& img) {
    const int w = img.width();
    const int h = img.height();
    std::vector<int> label(img.size(), -1);
    std::vector<ConnectedComponent> comps;
    std::vector<Point> stack;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (!img.at(x, y) || label[idx] >= 0) continue;

            const int id = static_cast<int>(comps.size());
            ConnectedComponent comp;
            comp.bbox = Box{x, y, x, y};
            label[idx] = id;
            stack.push_back({x, y});
            while (!stack.empty()) {
                const Point p = stack.back();
                stack.pop_back();
                comp.pixels.push_back(p);
                comp.bbox.x0 = std::min(comp.bbox.x0, p.x);
                comp.bbox.y0 = std::min(comp.bbox.y0, p.y);
                comp.bbox.x1 = std::max(comp.bbox.x1, p.x);
                comp.bbox.y1 = std::max(comp.bbox.y1, p.y);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = p.x + dx;
                        const int ny = p.y + dy;
                        if ((dx == 0 && dy == 0) || !img.contains(nx, ny) || !img.at(nx, ny)) continue;
                        const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
                        if (label[nidx] >= 0) continue;
                        label[nidx] = id;
                        stack.push_back({nx, ny});
                    }
                }
            }
            std::sort(comp.pixels.begin(), comp.pixels.end(), [](const Point& a, const Point& b) {
                return a.y != b.y ? a.y < b.y : a.x < b.x;
            });
            comps.push_back(std::move(comp));
        }
    }
    return comps;
}

int ink_count(const BinaryImage& img) noexcept {
    int n = 0;
    for (auto v : img.pixels()) n += v ? 1 : 0;
    return n;
}

Box ink_bbox(const BinaryImage& img) noexcept {
    Box box{img.width(), img.height(), -1, -1};
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (!img.at(x, y)) continue;
            box.x0 = std::min(box.x0, x);
            box.y0 = std::min(box.y0, y);
            box.x1 = std::max(box.x1, x);
            box.y1 = std::max(box.y1, y);
        }
    }
    if (box.x1 < 0) return Box{};
    return box;
}

Box clamp_box(const Box& box, int width, int height) noexcept {
    Box out{std::max(box.x0, 0), std::max(box.y0, 0), std::min(box.x1, width - 1),
            std::min(box.y1, height - 1)};
    if (out.empty()) return Box{};
    return out;
}

BinaryImage threshold(const GrayImage& img, double level) {
    BinaryImage out(img.width(), img.height());
    auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] >= level ? 1 : 0;
    return out;
}

GrayImage to_gray(const BinaryImage& img) {
    GrayImage out(img.width(), img.height());
    auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 255.0 : 0.0;
    return out;
}

}  // namespace savo::imaging
