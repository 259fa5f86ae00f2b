#include "mixkit/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <type_traits>
#include <string>

#include "mixkit/error.hpp"

namespace mixkit {

namespace {

__extension__ typedef __int128 Wide;

void check_dims(int width, int height, int channels) {
  if (width < 1 || height < 1) {
    throw InvalidArgument("image dimensions must be positive, got " +
                          std::to_string(width) + "x" + std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw InvalidArgument("image must have 1 or 3 channels, got " + std::to_string(channels));
  }
}

// Integer weights of one output sample along one axis. With
// pos = ((2i + 1) * in - out) / (2 * out), the triangle weight
// 1 - |j - pos| / max(scale, 1) has an exact integer numerator: over
// 2 * out when upscaling (pos clamped to [0, in - 1]) and over 2 * in when
// downscaling. Only ratios matter since each sample is normalised by `total`.
struct Taps {
  int first = 0;
  std::vector<std::int64_t> weights;
  std::int64_t total = 0;
};

std::vector<Taps> axis_taps(int in, int out) {
  const std::int64_t n_in = in;
  const std::int64_t n_out = out;
  std::vector<Taps> taps(out);
  for (int i = 0; i < out; ++i) {
    Taps& t = taps[i];
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    if (in <= out) {
      const std::int64_t p = std::clamp<std::int64_t>((2 * i + 1) * n_in - n_out, 0, 2 * n_out * (n_in - 1));
      lo = p / (2 * n_out);
      hi = std::min(lo + 1, n_in - 1);
      for (std::int64_t j = lo; j <= hi; ++j) {
        t.weights.push_back(std::max<std::int64_t>(0, 2 * n_out - std::abs(2 * j * n_out - p)));
      }
    } else {
      // Support is |(2j + 1) * out - (2i + 1) * in| < 2 * in.
      const std::int64_t c = (2 * i + 1) * n_in;
      lo = std::max<std::int64_t>(0, (c - 2 * n_in) / (2 * n_out) - 1);
      hi = std::min<std::int64_t>(n_in - 1, (c + 2 * n_in) / (2 * n_out) + 1);
      for (std::int64_t j = lo; j <= hi; ++j) {
        t.weights.push_back(std::max<std::int64_t>(0, 2 * n_in - std::abs((2 * j + 1) * n_out - c)));
      }
    }
    t.first = static_cast<int>(lo);
    for (std::int64_t w : t.weights) t.total += w;
  }
  return taps;
}

}  // namespace

Image::Image(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
  check_dims(width, height, channels);
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image::Image(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_dims(width, height, channels);
  if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw InvalidArgument("image data length " + std::to_string(data_.size()) +
                          " does not match " + std::to_string(width) + "x" +
                          std::to_string(height) + "x" + std::to_string(channels));
  }
}

Heatmap::Heatmap(int width, int height, std::vector<float> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width < 1 || height < 1) throw InvalidArgument("heatmap must be nonempty");
  if (values_.size() != static_cast<std::size_t>(width) * height) {
    throw InvalidArgument("heatmap value count does not match its dimensions");
  }
  for (float v : values_) {
    if (!(v >= 0.0f && v <= 1.0f)) throw InvalidArgument("heatmap activations must lie in [0, 1]");
  }
}

namespace {

template <int C, typename Row>
void horizontal(const std::uint8_t* line, const std::vector<Taps>& xt, Row* dst) {
  for (const Taps& t : xt) {
    const std::uint8_t* px = line + static_cast<std::size_t>(t.first) * C;
    const std::size_t n = t.weights.size();
    Row acc[C] = {};
    for (std::size_t k = 0; k < n; ++k) {
      const Row w = static_cast<Row>(t.weights[k]);
      for (int c = 0; c < C; ++c) acc[c] += w * px[k * C + c];
    }
    for (int c = 0; c < C; ++c) dst[c] = acc[c];
    dst += C;
  }
}

// acc / den rounded half away from zero (both nonnegative).
template <typename Acc>
std::uint8_t round_div(Acc acc, Acc den) {
  const Acc num = 2 * acc + den;
  const Acc d = 2 * den;
  if constexpr (std::is_same_v<Acc, Wide>) {
    return static_cast<std::uint8_t>(num / d);
  } else {
    // Floating-point estimate is within one of the exact quotient.
    auto q = static_cast<Acc>(static_cast<std::int64_t>(static_cast<double>(num) / static_cast<double>(d)));
    if (q * d > num) {
      --q;
    } else if ((q + 1) * d <= num) {
      ++q;
    }
    return static_cast<std::uint8_t>(q);
  }
}

// Row holds one horizontal sum (<= 255 * max x total), Acc one full sum.
template <typename Row, typename Acc>
Image resize_with(const Image& img, const std::vector<Taps>& xt, const std::vector<Taps>& yt) {
  const int channels = img.channels();
  const int out_w = static_cast<int>(xt.size());
  const int out_h = static_cast<int>(yt.size());
  const std::size_t row_stride = static_cast<std::size_t>(img.width()) * channels;
  const std::size_t out_stride = static_cast<std::size_t>(out_w) * channels;
  const std::uint8_t* src = img.data().data();

  // Horizontal pass keeps exact integer sums; the vertical pass divides once
  // and rounds half away from zero.
  const auto rows = std::make_unique_for_overwrite<Row[]>(out_stride * img.height());
  for (int y = 0; y < img.height(); ++y) {
    const std::uint8_t* line = src + y * row_stride;
    Row* dst = rows.get() + y * out_stride;
    if (channels == 3) {
      horizontal<3>(line, xt, dst);
    } else {
      horizontal<1>(line, xt, dst);
    }
  }

  std::vector<std::uint8_t> pixels(out_stride * out_h);
  std::vector<Acc> acc(out_stride);
  for (int j = 0; j < out_h; ++j) {
    const Taps& t = yt[j];
    std::fill(acc.begin(), acc.end(), Acc{0});
    for (std::size_t k = 0; k < t.weights.size(); ++k) {
      const Row* row = rows.get() + (t.first + k) * out_stride;
      const Row w = static_cast<Row>(t.weights[k]);
      for (std::size_t q = 0; q < out_stride; ++q) acc[q] += static_cast<Acc>(w) * row[q];
    }
    std::uint8_t* line = pixels.data() + j * out_stride;
    for (int i = 0; i < out_w; ++i) {
      const Acc d = static_cast<Acc>(t.total) * xt[i].total;
      for (int c = 0; c < channels; ++c) {
        const std::size_t q = static_cast<std::size_t>(i) * channels + c;
        line[q] = round_div(acc[q], d);
      }
    }
  }
  return Image(out_w, out_h, channels, std::move(pixels));
}

std::int64_t max_total(const std::vector<Taps>& taps) {
  std::int64_t m = 0;
  for (const Taps& t : taps) m = std::max(m, t.total);
  return m;
}

}  // namespace

Image resize(const Image& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) {
    throw InvalidArgument("resize target must be at least 1x1, got " + std::to_string(out_w) +
                          "x" + std::to_string(out_h));
  }
  if (img.empty()) throw InvalidArgument("resize of an empty image");
  if (out_w == img.width() && out_h == img.height()) return img;

  const auto xt = axis_taps(img.width(), out_w);
  const auto yt = axis_taps(img.height(), out_h);
  // 2 * acc + den, plus the 2 * den slack used when rounding, must fit in 64 bits.
  const std::int64_t tx = max_total(xt);
  const Wide bound = Wide{515} * tx * max_total(yt);
  if (bound >= std::numeric_limits<std::int64_t>::max()) return resize_with<std::int64_t, Wide>(img, xt, yt);
  // Weights never exceed their total, so these also bound every weight.
  constexpr std::int64_t kRowMax = std::numeric_limits<std::int32_t>::max();
  if (255 * tx < kRowMax && max_total(yt) < kRowMax) {
    return resize_with<std::int32_t, std::int64_t>(img, xt, yt);
  }
  return resize_with<std::int64_t, std::int64_t>(img, xt, yt);
}

Image crop(const Image& img, const Region& r) {
  if (!r.inside(img.width(), img.height())) {
    throw InvalidArgument("crop region [" + std::to_string(r.x_l) + "," + std::to_string(r.x_r) +
                          ")x[" + std::to_string(r.y_b) + "," + std::to_string(r.y_t) +
                          ") is not inside a " + std::to_string(img.width()) + "x" +
                          std::to_string(img.height()) + " image");
  }
  const int channels = img.channels();
  Image out(r.width(), r.height(), channels);
  const auto src = img.data();
  auto dst = out.data();
  const std::size_t row_bytes = static_cast<std::size_t>(r.width()) * channels;
  for (int j = 0; j < r.height(); ++j) {
    const std::size_t from = (static_cast<std::size_t>(r.y_b + j) * img.width() + r.x_l) * channels;
    std::copy_n(src.begin() + from, row_bytes, dst.begin() + j * row_bytes);
  }
  return out;
}

Region center_crop_region(int img_w, int img_h, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1 || out_w > img_w || out_h > img_h) {
    throw InvalidArgument("center crop " + std::to_string(out_w) + "x" + std::to_string(out_h) +
                          " does not fit a " + std::to_string(img_w) + "x" +
                          std::to_string(img_h) + " image");
  }
  const int x_l = (img_w - out_w) / 2;
  const int y_b = (img_h - out_h) / 2;
  return {x_l, x_l + out_w, y_b, y_b + out_h};
}

Image center_crop(const Image& img, int out_w, int out_h) {
  return crop(img, center_crop_region(img.width(), img.height(), out_w, out_h));
}

Heatmap upscale_nearest(const Heatmap& h, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) throw InvalidArgument("heatmap target must be at least 1x1");
  std::vector<float> values(static_cast<std::size_t>(out_w) * out_h);
  for (int y = 0; y < out_h; ++y) {
    const int sy = static_cast<int>(static_cast<std::int64_t>(y) * h.height() / out_h);
    for (int x = 0; x < out_w; ++x) {
      const int sx = static_cast<int>(static_cast<std::int64_t>(x) * h.width() / out_w);
      values[static_cast<std::size_t>(y) * out_w + x] = h(sx, sy);
    }
  }
  return Heatmap(out_w, out_h, std::move(values));
}

}  // namespace mixkit
