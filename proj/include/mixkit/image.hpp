#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mixkit/region.hpp"

namespace mixkit {

// Row-major 8-bit raster. Pixel (x, y) channel c lives at
// data[(y * width + x) * channels + c]; x indexes columns, y rows, origin at
// the top-left corner.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, std::uint8_t fill = 0);
  Image(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }
  std::int64_t area() const { return std::int64_t{width_} * height_; }

  std::uint8_t operator()(int x, int y, int c = 0) const {
    return data_[index(x, y, c)];
  }
  std::uint8_t& operator()(int x, int y, int c = 0) {
    return data_[index(x, y, c)];
  }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

// Activation map A(x, y) with values in [0, 1], same layout as a
// single-channel Image.
class Heatmap {
 public:
  Heatmap() = default;
  Heatmap(int width, int height, std::vector<float> values);

  int width() const { return width_; }
  int height() const { return height_; }
  float operator()(int x, int y) const {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::span<const float> values() const { return values_; }

  friend bool operator==(const Heatmap&, const Heatmap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> values_;
};

// Bilinear resampling with pixel-center alignment. Upscaling samples at
// (i + 0.5) * in / out - 0.5 with border clamping; downscaling widens the
// triangle kernel by the scale factor so every source pixel contributes.
// Weights are rational, so the result is computed exactly in integers.
// Samples are rounded half away from zero.
Image resize(const Image& img, int out_w, int out_h);

Image crop(const Image& img, const Region& r);

// Region used by center_crop: x_l = floor((W - w) / 2), y_b = floor((H - h) / 2).
Region center_crop_region(int img_w, int img_h, int out_w, int out_h);
Image center_crop(const Image& img, int out_w, int out_h);

// Nearest-neighbour resampling for heatmaps whose resolution differs from
// the image they annotate. Only used when explicitly requested.
Heatmap upscale_nearest(const Heatmap& h, int out_w, int out_h);

}  // namespace mixkit
