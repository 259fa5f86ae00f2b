#include "mixkit/region.hpp"

#include <algorithm>
#include <string>

#include "mixkit/error.hpp"
#include "mixkit/image.hpp"
#include "mixkit/rng.hpp"

namespace mixkit {

namespace {

// ceil(c - size / 2) for integer c, without going through floating point.
int lower_bound_from_center(int c, int size) {
  // size even: c - size/2; size odd: c - (size - 1)/2.
  return c - size / 2;
}

// Clamps [lo, lo + size) into [0, limit) using the boundary cases: a low
// edge at or below 0 pins to [0, size), a high edge at or above the limit
// pins to [limit - size, limit).
std::pair<int, int> clamp_axis(int lo, int hi, int size, int limit) {
  if (lo <= 0) {
    lo = 0;
    hi = size;
  }
  if (hi >= limit) {
    lo = limit - size;
    hi = limit;
  }
  return {lo, hi};
}

}  // namespace

std::string_view to_string(CenterStrategy s) {
  switch (s) {
    case CenterStrategy::salient:
      return "salient";
    case CenterStrategy::non_salient:
      return "non_salient";
    case CenterStrategy::random:
      return "random";
  }
  return "?";
}

SaliencySets saliency_sets(const Heatmap& h) {
  const auto values = h.values();
  if (values.empty()) throw InvalidArgument("saliency sets of an empty heatmap");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  SaliencySets sets;
  sets.t_u = *mx;
  sets.t_l = *mn;
  for (int y = 0; y < h.height(); ++y) {
    for (int x = 0; x < h.width(); ++x) {
      const float a = h(x, y);
      if (a >= sets.t_u) sets.salient.push_back({x, y});
      if (a <= sets.t_l) sets.non_salient.push_back({x, y});
    }
  }
  return sets;
}

Region region_from_center(Point c, int w_p, int h_p, int img_w, int img_h) {
  if (w_p < 1 || h_p < 1 || w_p > img_w || h_p > img_h) {
    throw InvalidArgument("patch " + std::to_string(w_p) + "x" + std::to_string(h_p) +
                          " does not fit a " + std::to_string(img_w) + "x" +
                          std::to_string(img_h) + " image");
  }
  if (c.x < 0 || c.x >= img_w || c.y < 0 || c.y >= img_h) {
    throw InvalidArgument("region center (" + std::to_string(c.x) + ", " + std::to_string(c.y) +
                          ") lies outside the image");
  }
  // floor(c + size/2) is lo + size for even sizes and lo + size - 1 for odd
  // ones; the odd case is extended by one so the extent is exact.
  const int x_l = lower_bound_from_center(c.x, w_p);
  const int y_b = lower_bound_from_center(c.y, h_p);
  const auto [xl, xr] = clamp_axis(x_l, x_l + w_p, w_p, img_w);
  const auto [yb, yt] = clamp_axis(y_b, y_b + h_p, h_p, img_h);
  return {xl, xr, yb, yt};
}

Point sample_center(CenterStrategy strategy, const SaliencySets* sets, int img_w, int img_h,
                    Rng& rng) {
  if (img_w < 1 || img_h < 1) throw InvalidArgument("cannot sample a center in an empty image");
  if (strategy == CenterStrategy::random) {
    const int x = static_cast<int>(rng.uniform_int(0, img_w - 1));
    const int y = static_cast<int>(rng.uniform_int(0, img_h - 1));
    return {x, y};
  }
  if (!sets) {
    throw InvalidArgument(std::string("a heatmap is required for the ") +
                          std::string(to_string(strategy)) + " strategy");
  }
  const auto& pool = strategy == CenterStrategy::salient ? sets->salient : sets->non_salient;
  if (pool.empty()) {
    throw InvalidArgument(std::string("empty ") + std::string(to_string(strategy)) +
                          " coordinate set");
  }
  const auto k = rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1);
  return pool[static_cast<std::size_t>(k)];
}

Region sample_region(CenterStrategy strategy, int w_p, int h_p, const SaliencySets* sets,
                     int img_w, int img_h, Rng& rng) {
  if (w_p < 1 || h_p < 1 || w_p > img_w || h_p > img_h) {
    throw InvalidArgument("patch " + std::to_string(w_p) + "x" + std::to_string(h_p) +
                          " does not fit a " + std::to_string(img_w) + "x" +
                          std::to_string(img_h) + " image");
  }
  const Point c = sample_center(strategy, sets, img_w, img_h, rng);
  return region_from_center(c, w_p, h_p, img_w, img_h);
}

}  // namespace mixkit
