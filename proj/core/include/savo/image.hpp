#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "savo/error.hpp"

namespace savo {

/// Row-major 2-D raster. Coordinates are (x, y) = (column, row).
template <typename T>
class Raster {
public:
    using value_type = T;

    Raster() = default;
    Raster(int width, int height, T fill = T{})
        : width_(width), height_(height) {
        if (width < 0 || height < 0) {
            throw Error(ErrorCode::BadDims, "negative raster dimensions");
        }
        pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }
    Raster(int width, int height, std::vector<T> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels)) {
        if (width < 0 || height < 0 ||
            pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
            throw Error(ErrorCode::BadDims, "pixel count does not match width*height");
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return pixels_.empty(); }
    std::size_t size() const noexcept { return pixels_.size(); }

    bool contains(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    T& at(int x, int y) noexcept { return pixels_[index(x, y)]; }
    const T& at(int x, int y) const noexcept { return pixels_[index(x, y)]; }

    std::span<T> pixels() noexcept { return pixels_; }
    std::span<const T> pixels() const noexcept { return pixels_; }

    std::span<T> row(int y) noexcept {
        return std::span<T>(pixels_).subspan(static_cast<std::size_t>(y) * width_, width_);
    }
    std::span<const T> row(int y) const noexcept {
        return std::span<const T>(pixels_).subspan(static_cast<std::size_t>(y) * width_, width_);
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> pixels_;
};

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Hsv {
    double h = 0.0;  // degrees, [0, 360)
    double s = 0.0;  // [0, 1]
    double v = 0.0;  // [0, 1]
    friend bool operator==(const Hsv&, const Hsv&) = default;
};

using ColorImage = Raster<Rgb>;
using HsvImage = Raster<Hsv>;
/// Intensities in [0, 255], real-valued until exported.
using GrayImage = Raster<double>;
/// 1 = ink, 0 = background.
using BinaryImage = Raster<std::uint8_t>;

/// Inclusive pixel box.
struct Box {
    int x0 = 0;
    int y0 = 0;
    int x1 = -1;
    int y1 = -1;

    int width() const noexcept { return x1 - x0 + 1; }
    int height() const noexcept { return y1 - y0 + 1; }
    long area() const noexcept {
        return empty() ? 0 : static_cast<long>(width()) * static_cast<long>(height());
    }
    bool empty() const noexcept { return x1 < x0 || y1 < y0; }
    bool contains(int x, int y) const noexcept { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }

    friend bool operator==(const Box&, const Box&) = default;
};

struct Point {
    int x = 0;
    int y = 0;
    friend bool operator==(const Point&, const Point&) = default;
};

}  // namespace savo
