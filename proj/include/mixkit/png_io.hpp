#pragma once

#include <filesystem>

#include "mixkit/image.hpp"

namespace mixkit {

struct PngInfo {
  int width = 0;
  int height = 0;
  int channels = 0;
};

// 8-bit grayscale or RGB PNGs only. Anything else (16-bit, palette, alpha,
// non-PNG) raises DecodeError naming the path.
Image load_image(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it into place.
void save_image(const Image& img, const std::filesystem::path& path);

// Grayscale PNG, activation = value / 255.
Heatmap load_heatmap(const std::filesystem::path& path);

// Header-only read; validates format without decoding pixels.
PngInfo read_png_info(const std::filesystem::path& path);

// Replaces `path` atomically with `bytes` (temporary file + rename).
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace mixkit
