#include <doctest.h>

#include "mixkit/error.hpp"
#include "mixkit/image.hpp"
#include "support.hpp"

using mixkit::Image;
using mixkit::Region;

TEST_CASE("image construction enforces its invariants") {
  CHECK_THROWS_AS(Image(0, 4, 1), mixkit::InvalidArgument);
  CHECK_THROWS_AS(Image(4, 4, 2), mixkit::InvalidArgument);
  CHECK_THROWS_AS(Image(2, 2, 1, std::vector<std::uint8_t>(3)), mixkit::InvalidArgument);
  const Image img(3, 2, 3, 7);
  CHECK(img.data().size() == 18);
  CHECK(img(2, 1, 2) == 7);
}

TEST_CASE("heatmap rejects activations outside [0, 1]") {
  CHECK_THROWS_AS(mixkit::Heatmap(1, 2, {0.5f, 1.5f}), mixkit::InvalidArgument);
  CHECK_THROWS_AS(mixkit::Heatmap(2, 2, {0.5f}), mixkit::InvalidArgument);
  CHECK_NOTHROW(mixkit::Heatmap(1, 2, {0.0f, 1.0f}));
}

TEST_CASE("resize at the same size is a copy") {
  std::mt19937 gen(1);
  const Image img = testing::random_image(gen, 7, 5, 3);
  CHECK(mixkit::resize(img, 7, 5) == img);
}

TEST_CASE("resize of a constant 2x2 to 1x1 keeps the value") {
  const Image img(2, 2, 1, 100);
  const Image out = mixkit::resize(img, 1, 1);
  CHECK(out.width() == 1);
  CHECK(out(0, 0) == 100);
}

TEST_CASE("resize 4x4 gradient to 2x2 matches hand-computed weights") {
  // v(x, y) = 10x + 40y. Downscaling by 2 widens the triangle to radius 2:
  // per-axis weights are (3, 3, 1)/7 for the first sample and (1, 3, 3)/7 for
  // the second, giving 250/7, 360/7, 690/7, 800/7.
  Image img(4, 4, 1);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) img(x, y) = static_cast<std::uint8_t>(10 * x + 40 * y);
  const Image out = mixkit::resize(img, 2, 2);
  CHECK(out(0, 0) == 36);
  CHECK(out(1, 0) == 51);
  CHECK(out(0, 1) == 99);
  CHECK(out(1, 1) == 114);
  CHECK(out == testing::bilinear_oracle(img, 2, 2));
}

TEST_CASE("resize upsampling interpolates between pixel centers") {
  // Samples at -0.25, 0.25, 0.75, 1.25 clamp to 0, 0.25, 0.75, 1.
  const Image img(2, 1, 1, std::vector<std::uint8_t>{0, 100});
  const Image out = mixkit::resize(img, 4, 1);
  CHECK(out(0, 0) == 0);
  CHECK(out(1, 0) == 25);
  CHECK(out(2, 0) == 75);
  CHECK(out(3, 0) == 100);
}

TEST_CASE("resize agrees with the 2-D oracle on random shapes") {
  std::mt19937 gen(2);
  std::uniform_int_distribution<int> dim(1, 13);
  for (int trial = 0; trial < 150; ++trial) {
    const Image img = testing::random_image(gen, dim(gen), dim(gen), trial % 2 ? 3 : 1);
    const int w = dim(gen);
    const int h = dim(gen);
    CAPTURE(img.width());
    CAPTURE(img.height());
    CAPTURE(w);
    CAPTURE(h);
    REQUIRE(mixkit::resize(img, w, h) == testing::bilinear_oracle(img, w, h));
  }
}

TEST_CASE("resize of a constant image is constant for any target") {
  for (int v : {0, 1, 128, 254, 255}) {
    const Image img(9, 6, 3, static_cast<std::uint8_t>(v));
    for (int w = 1; w <= 20; w += 3) {
      for (int h = 1; h <= 20; h += 4) {
        const Image out = mixkit::resize(img, w, h);
        for (auto s : out.data()) REQUIRE(s == v);
      }
    }
  }
}

TEST_CASE("resize is deterministic and rejects empty targets") {
  std::mt19937 gen(3);
  const Image img = testing::random_image(gen, 31, 17, 3);
  CHECK(mixkit::resize(img, 11, 5) == mixkit::resize(img, 11, 5));
  CHECK_THROWS_AS(mixkit::resize(img, 0, 5), mixkit::InvalidArgument);
  CHECK_THROWS_AS(mixkit::resize(img, 5, 0), mixkit::InvalidArgument);
}

TEST_CASE("crop") {
  std::mt19937 gen(4);
  const Image img = testing::random_image(gen, 8, 8, 3);

  SUBCASE("full region is identity") { CHECK(mixkit::crop(img, Region::full(8, 8)) == img); }

  SUBCASE("interior region matches per-pixel copy") {
    const Region r{2, 5, 1, 4};
    const Image out = mixkit::crop(img, r);
    CHECK(out.width() == 3);
    CHECK(out.height() == 3);
    CHECK(out == testing::crop_oracle(img, r));
  }

  SUBCASE("region touching the right and bottom edges") {
    const Region r{5, 8, 6, 8};
    const Image out = mixkit::crop(img, r);
    CHECK(out.width() == 3);
    CHECK(out.height() == 2);
    CHECK(out == testing::crop_oracle(img, r));
  }

  SUBCASE("out-of-bounds and empty regions are rejected") {
    CHECK_THROWS_AS(mixkit::crop(img, Region{5, 9, 0, 2}), mixkit::InvalidArgument);
    CHECK_THROWS_AS(mixkit::crop(img, Region{-1, 2, 0, 2}), mixkit::InvalidArgument);
    CHECK_THROWS_AS(mixkit::crop(img, Region{3, 3, 0, 2}), mixkit::InvalidArgument);
  }
}

TEST_CASE("center_crop") {
  std::mt19937 gen(5);
  const Image img = testing::random_image(gen, 6, 5, 1);
  CHECK(mixkit::center_crop(img, 6, 5) == img);
  CHECK(mixkit::center_crop_region(4, 4, 2, 2) == Region{1, 3, 1, 3});
  CHECK(mixkit::center_crop_region(5, 5, 2, 2) == Region{1, 3, 1, 3});
  CHECK_THROWS_AS(mixkit::center_crop(img, 7, 5), mixkit::InvalidArgument);
  CHECK_THROWS_AS(mixkit::center_crop(img, 6, 6), mixkit::InvalidArgument);

  // Exhaustive sweep against the floor formulas.
  for (int w = 1; w <= 6; ++w) {
    for (int h = 1; h <= 5; ++h) {
      const int x_l = (6 - w) / 2;
      const int y_b = (5 - h) / 2;
      REQUIRE(mixkit::center_crop(img, w, h) ==
              testing::crop_oracle(img, Region{x_l, x_l + w, y_b, y_b + h}));
    }
  }
}

TEST_CASE("upscale_nearest replicates heatmap cells") {
  const mixkit::Heatmap h(2, 1, {0.25f, 0.75f});
  const mixkit::Heatmap up = mixkit::upscale_nearest(h, 4, 2);
  CHECK(up.width() == 4);
  CHECK(up.height() == 2);
  CHECK(up(0, 0) == 0.25f);
  CHECK(up(1, 1) == 0.25f);
  CHECK(up(2, 0) == 0.75f);
  CHECK(up(3, 1) == 0.75f);
}
