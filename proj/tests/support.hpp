#pragma once

// Shared fixtures and independent oracles for the test suites. Nothing in
// here calls into the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "mixkit/image.hpp"
#include "mixkit/region.hpp"

namespace testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    const auto tag = std::to_string(rd()) + std::to_string(rd());
    path_ = fs::temp_directory_path() / ("mixkit-test-" + tag);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline mixkit::Image random_image(std::mt19937& gen, int w, int h, int channels) {
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h * channels);
  for (auto& v : data) v = static_cast<std::uint8_t>(byte(gen));
  return mixkit::Image(w, h, channels, std::move(data));
}

inline void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Direct per-pixel copy.
inline mixkit::Image crop_oracle(const mixkit::Image& img, const mixkit::Region& r) {
  mixkit::Image out(r.x_r - r.x_l, r.y_t - r.y_b, img.channels());
  for (int j = 0; j < out.height(); ++j)
    for (int i = 0; i < out.width(); ++i)
      for (int c = 0; c < img.channels(); ++c) out(i, j, c) = img(r.x_l + i, r.y_b + j, c);
  return out;
}

// Nested-loop pixel partition: patch inside r, target outside.
inline mixkit::Image paste_oracle(const mixkit::Image& patch, const mixkit::Image& target,
                                  const mixkit::Region& r) {
  mixkit::Image out(target.width(), target.height(), target.channels());
  for (int y = 0; y < target.height(); ++y)
    for (int x = 0; x < target.width(); ++x)
      for (int c = 0; c < target.channels(); ++c) {
        const bool in = x >= r.x_l && x < r.x_r && y >= r.y_b && y < r.y_t;
        out(x, y, c) = in ? patch(x - r.x_l, y - r.y_b, c) : target(x, y, c);
      }
  return out;
}

using Fraction = boost::rational<std::int64_t>;

// Weight of source column `j` for output sample `i` when resampling in -> out,
// evaluated in exact rationals straight from the kernel definition.
inline Fraction bilinear_weight(int i, int j, int in, int out) {
  const Fraction scale(in, out);
  Fraction pos = (Fraction(i) + Fraction(1, 2)) * scale - Fraction(1, 2);
  Fraction d;
  if (scale <= Fraction(1)) {
    pos = std::clamp(pos, Fraction(0), Fraction(in - 1));
    d = boost::abs(Fraction(j) - pos);
  } else {
    d = boost::abs(Fraction(j) - pos) / scale;
  }
  return d >= Fraction(1) ? Fraction(0) : Fraction(1) - d;
}

// Full 2-D weighted sum over every source pixel, normalised per output pixel
// and rounded half up.
inline mixkit::Image bilinear_oracle(const mixkit::Image& img, int out_w, int out_h) {
  mixkit::Image out(out_w, out_h, img.channels());
  for (int oy = 0; oy < out_h; ++oy)
    for (int ox = 0; ox < out_w; ++ox)
      for (int c = 0; c < img.channels(); ++c) {
        Fraction wsum(0);
        Fraction acc(0);
        for (int y = 0; y < img.height(); ++y) {
          const Fraction wy = bilinear_weight(oy, y, img.height(), out_h);
          if (wy == Fraction(0)) continue;
          for (int x = 0; x < img.width(); ++x) {
            const Fraction w = wy * bilinear_weight(ox, x, img.width(), out_w);
            wsum += w;
            acc += w * Fraction(static_cast<std::int64_t>(img(x, y, c)));
          }
        }
        const Fraction v = acc / wsum + Fraction(1, 2);
        out(ox, oy, c) = static_cast<std::uint8_t>(v.numerator() / v.denominator());
      }
  return out;
}

// Nearest feasible placement of a size-long span to its unclamped position
// [ceil(c - size/2), floor(c + size/2) (+1 for odd sizes)), found by search.
inline std::pair<int, int> clamp_axis_oracle(int c, int size, int limit) {
  const int raw_lo = static_cast<int>(std::ceil(c - size / 2.0));
  int best = -1;
  for (int lo = 0; lo + size <= limit; ++lo) {
    if (best < 0 || std::abs(lo - raw_lo) < std::abs(best - raw_lo)) best = lo;
  }
  return {best, best + size};
}

inline mixkit::Region region_oracle(mixkit::Point c, int w, int h, int img_w, int img_h) {
  const auto [xl, xr] = clamp_axis_oracle(c.x, w, img_w);
  const auto [yb, yt] = clamp_axis_oracle(c.y, h, img_h);
  return {xl, xr, yb, yt};
}

inline const std::vector<std::uint8_t> k16BitGray = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44,
    0x52, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x02, 0x10, 0x00, 0x00, 0x00, 0x00, 0x07,
    0x4d, 0x8e, 0xbb, 0x00, 0x00, 0x00, 0x12, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x60,
    0x60, 0x60, 0x7e, 0xc1, 0x50, 0x6a, 0xf0, 0xff, 0x3f, 0x00, 0x0a, 0xf0, 0x03, 0x8f, 0x32,
    0xeb, 0x68, 0xb0, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82
};
inline const std::vector<std::uint8_t> kPalette = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44,
    0x52, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x02, 0x01, 0x03, 0x00, 0x00, 0x00, 0x48,
    0x78, 0x9f, 0x67, 0x00, 0x00, 0x00, 0x03, 0x50, 0x4c, 0x54, 0x45, 0x00, 0x00, 0x00, 0xa7,
    0x7a, 0x3d, 0xda, 0x00, 0x00, 0x00, 0x0c, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x60,
    0x60, 0x60, 0x00, 0x00, 0x00, 0x04, 0x00, 0x01, 0xf6, 0x17, 0x38, 0x55, 0x00, 0x00, 0x00,
    0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82
};
inline const std::vector<std::uint8_t> kRgba = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44,
    0x52, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x02, 0x08, 0x06, 0x00, 0x00, 0x00, 0x72,
    0xb6, 0x0d, 0x24, 0x00, 0x00, 0x00, 0x14, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x64,
    0x64, 0x62, 0x66, 0x61, 0x60, 0x60, 0x60, 0x60, 0x62, 0x80, 0x02, 0x00, 0x00, 0xcc, 0x00,
    0x0e, 0xe8, 0xb7, 0xf5, 0x84, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42,
    0x60, 0x82
};

}  // namespace testing
