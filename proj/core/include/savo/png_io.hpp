#pragma once

#include <filesystem>

#include "savo/image.hpp"

namespace savo::io {

/// Any PNG, converted to 24-bit RGB.
ColorImage read_color_png(const std::filesystem::path& path);
/// Any PNG, converted to 8-bit gray.
GrayImage read_gray_png(const std::filesystem::path& path);
/// Dark pixels (< 128) are ink.
BinaryImage read_binary_png(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const ColorImage& img);
/// Values rounded and clamped to [0, 255].
void write_png(const std::filesystem::path& path, const GrayImage& img);
/// Ink is written black (0) on white (255).
void write_png(const std::filesystem::path& path, const BinaryImage& img);

}  // namespace savo::io
