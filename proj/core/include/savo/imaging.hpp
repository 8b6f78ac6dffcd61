#pragma once

#include <vector>

#include "savo/image.hpp"

/// Low-level raster math shared by every pipeline stage.
namespace savo::imaging {

/// Hexcone RGB -> HSV. Achromatic pixels get h = 0.
HsvImage rgb_to_hsv(const ColorImage& img);
Hsv rgb_to_hsv(Rgb px) noexcept;

/// V channel scaled back to [0, 255].
GrayImage value_channel(const HsvImage& hsv);

/// ITU-R BT.601 luma.
GrayImage to_gray(const ColorImage& img);

/// sqrt(Gx^2 + Gy^2) with the 3x3 Sobel kernels, replicated borders, clamped to [0, 255].
/// Throws ImageTooSmall below 3x3.
GrayImage sobel_magnitude(const GrayImage& img);

/// Inverse-distance weighted average of the (at most four) grid neighbours of (x, y),
/// each weighted by 1 / distance. Grid hits within 1e-9 return the pixel exactly.
double interpolate_inverse_distance(const GrayImage& img, double x, double y);

/// Enlarge by `factor` >= 1; output pixels back-project onto the source grid
/// (corner aligned) and are sampled with interpolate_inverse_distance.
GrayImage upscale(const GrayImage& img, double factor);

/// Nearest-neighbour resize to `cols` x `rows`: J(i, j) = I(floor(i*P/N), floor(j*Q/M)).
GrayImage resize_nearest(const GrayImage& img, int cols, int rows);
BinaryImage resize_nearest(const BinaryImage& img, int cols, int rows);

std::vector<int> horizontal_projection(const BinaryImage& img);
std::vector<int> vertical_projection(const BinaryImage& img);

struct ConnectedComponent {
    Box bbox;
    std::vector<Point> pixels;  // row-major order

    int pixel_count() const noexcept { return static_cast<int>(pixels.size()); }
};

/// 8-connected ink components, ordered by their first pixel in row-major scan.
std::vector<ConnectedComponent> connected_components(const BinaryImage& img);

int ink_count(const BinaryImage& img) noexcept;

/// Bounding box of all ink; empty box when there is none.
Box ink_bbox(const BinaryImage& img) noexcept;

template <typename T>
Raster<T> crop(const Raster<T>& img, const Box& box) {
    if (box.empty() || box.x0 < 0 || box.y0 < 0 || box.x1 >= img.width() || box.y1 >= img.height()) {
        throw Error(ErrorCode::OutOfBounds, "crop box outside image");
    }
    Raster<T> out(box.width(), box.height());
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            out.at(x, y) = img.at(box.x0 + x, box.y0 + y);
        }
    }
    return out;
}

/// Intersection of `box` with the image rectangle.
Box clamp_box(const Box& box, int width, int height) noexcept;

/// ink = value >= threshold.
BinaryImage threshold(const GrayImage& img, double level);

/// Ink rendered as 255, background 0.
GrayImage to_gray(const BinaryImage& img);

}  // namespace savo::imaging
