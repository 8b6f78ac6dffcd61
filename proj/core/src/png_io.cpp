#include "savo/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

namespace savo::io {

namespace {

std::vector<std::uint8_t> read_raw(const std::filesystem::path& path, png_uint_32 format, int& width,
                                   int& height) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
        throw Error(ErrorCode::Io, "cannot read PNG " + path.string() + ": " + image.message);
    }
    image.format = format;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        png_image_free(&image);
        throw Error(ErrorCode::Io, "cannot decode PNG " + path.string() + ": " + image.message);
    }
    width = static_cast<int>(image.width);
    height = static_cast<int>(image.height);
    return buffer;
}

void write_raw(const std::filesystem::path& path, png_uint_32 format, int width, int height,
               const std::vector<std::uint8_t>& buffer) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = format;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, buffer.data(), 0, nullptr)) {
        throw Error(ErrorCode::Io, "cannot write PNG " + path.string() + ": " + image.message);
    }
}

}  // namespace

ColorImage read_color_png(const std::filesystem::path& path) {
    int w = 0;
    int h = 0;
    auto raw = read_raw(path, PNG_FORMAT_RGB, w, h);
    ColorImage out(w, h);
    auto px = out.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        px[i] = Rgb{raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]};
    }
    return out;
}

GrayImage read_gray_png(const std::filesystem::path& path) {
    int w = 0;
    int h = 0;
    auto raw = read_raw(path, PNG_FORMAT_GRAY, w, h);
    GrayImage out(w, h);
    auto px = out.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = raw[i];
    return out;
}

BinaryImage read_binary_png(const std::filesystem::path& path) {
    int w = 0;
    int h = 0;
    auto raw = read_raw(path, PNG_FORMAT_GRAY, w, h);
    BinaryImage out(w, h);
    auto px = out.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = raw[i] < 128 ? 1 : 0;
    return out;
}

void write_png(const std::filesystem::path& path, const ColorImage& img) {
    std::vector<std::uint8_t> raw(img.size() * 3);
    auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        raw[3 * i] = px[i].r;
        raw[3 * i + 1] = px[i].g;
        raw[3 * i + 2] = px[i].b;
    }
    write_raw(path, PNG_FORMAT_RGB, img.width(), img.height(), raw);
}

void write_png(const std::filesystem::path& path, const GrayImage& img) {
    std::vector<std::uint8_t> raw(img.size());
    auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        raw[i] = static_cast<std::uint8_t>(std::clamp(std::lround(px[i]), 0L, 255L));
    }
    write_raw(path, PNG_FORMAT_GRAY, img.width(), img.height(), raw);
}

void write_png(const std::filesystem::path& path, const BinaryImage& img) {
    std::vector<std::uint8_t> raw(img.size());
    auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) raw[i] = px[i] ? 0 : 255;
    write_raw(path, PNG_FORMAT_GRAY, img.width(), img.height(), raw);
}

}  // namespace savo::io
