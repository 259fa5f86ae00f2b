#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace mixkit {

class Heatmap;
class Rng;

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

// Half-open rectangle [x_l, x_r) x [y_b, y_t).
struct Region {
  int x_l = 0;
  int x_r = 0;
  int y_b = 0;
  int y_t = 0;

  int width() const { return x_r - x_l; }
  int height() const { return y_t - y_b; }
  std::int64_t area() const { return std::int64_t{width()} * height(); }
  bool nonempty() const { return 0 <= x_l && x_l < x_r && 0 <= y_b && y_b < y_t; }
  bool inside(int img_w, int img_h) const {
    return nonempty() && x_r <= img_w && y_t <= img_h;
  }
  bool contains(int x, int y) const {
    return x_l <= x && x < x_r && y_b <= y && y < y_t;
  }

  static Region full(int img_w, int img_h) { return {0, img_w, 0, img_h}; }

  friend bool operator==(const Region&, const Region&) = default;
};

// Argmax / argmin coordinate sets of a heatmap, in row-major order.
struct SaliencySets {
  std::vector<Point> salient;
  std::vector<Point> non_salient;
  float t_u = 0.0f;
  float t_l = 0.0f;
};

enum class CenterStrategy { salient, non_salient, random };

std::string_view to_string(CenterStrategy s);

SaliencySets saliency_sets(const Heatmap& h);

// Places a w_p x h_p patch around center c and clamps it into the image.
// Odd sizes get the extra pixel on the right/bottom side, so the result
// always has exactly the requested extent.
Region region_from_center(Point c, int w_p, int h_p, int img_w, int img_h);

// Salient/non-salient: one draw from the corresponding set. Random: x then y.
Point sample_center(CenterStrategy strategy, const SaliencySets* sets,
                    int img_w, int img_h, Rng& rng);

Region sample_region(CenterStrategy strategy, int w_p, int h_p,
                     const SaliencySets* sets, int img_w, int img_h, Rng& rng);

}  // namespace mixkit
