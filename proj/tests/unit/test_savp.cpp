/* Copyright 2026 The FaceShield Toolkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <doctest.h>

#include <algorithm>
#include <set>

#include "fsk/error.hpp"
#include "fsk/rng.hpp"
#include "fsk/savp.hpp"
#include "support/fixtures.hpp"

using namespace fsk;

namespace {

RasterImage solid(int w, int h, std::uint8_t r, std::uint8_t g,
                  std::uint8_t b) {
  RasterImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.at(x, y, 0) = r;
      img.at(x, y, 1) = g;
      img.at(x, y, 2) = b;
    }
  }
  return img;
}

// The hand-evaluated 3x3 pattern: neighbors alternate 10/20 clockwise from
// the top-left around a center of 15, giving code 0b10101010 = 170.
GrayImage lbp_fixture_3x3() {
  return GrayImage(3, 3, {10, 20, 10, 20, 15, 20, 10, 20, 10});
}

// Strictly increasing pixel map over [0, max_in] into [0, 255].
std::vector<std::uint8_t> random_monotone_map(SplitMix64& rng, int max_in) {
  // Choose max_in + 1 distinct values from [0, 255], sorted.
  std::set<int> chosen;
  while (static_cast<int>(chosen.size()) < max_in + 1) {
    chosen.insert(static_cast<int>(rng.next_below(256)));
  }
  return std::vector<std::uint8_t>(chosen.begin(), chosen.end());
}

GrayImage vertical_step_edge(int size) {
  GrayImage img(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      img.at(x, y) = x < size / 2 ? 0 : 255;
    }
  }
  return img;
}

GrayImage rotate90(const GrayImage& img) {
  GrayImage out(img.height, img.width);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      out.at(img.height - 1 - y, x) = img.at(x, y);
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("savp") {

TEST_CASE("to_gray evaluates the luma weights") {
  CHECK(to_gray(solid(1, 1, 255, 255, 255)).at(0, 0) == 255);
  CHECK(to_gray(solid(1, 1, 0, 0, 0)).at(0, 0) == 0);
  // 0.299 * 255 = 76.245 -> 76
  CHECK(to_gray(solid(1, 1, 255, 0, 0)).at(0, 0) == 76);
  // 0.587 * 255 = 149.685 -> 150, 0.114 * 255 = 29.07 -> 29
  CHECK(to_gray(solid(1, 1, 0, 255, 0)).at(0, 0) == 150);
  CHECK(to_gray(solid(1, 1, 0, 0, 255)).at(0, 0) == 29);
}

TEST_CASE("to_gray maps achromatic pixels to themselves") {
  for (int v = 0; v <= 255; ++v) {
    CHECK(to_gray(solid(1, 1, v, v, v)).at(0, 0) == v);
  }
}

TEST_CASE("lbp of a constant image is 255 on the interior") {
  GrayImage img(5, 4, std::vector<std::uint8_t>(20, 80));
  const auto plane = lbp_plane(img);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 5; ++x) {
      const bool border = x == 0 || y == 0 || x == 4 || y == 3;
      CHECK(plane[y * 5 + x] == (border ? 0 : 255));
    }
  }
}

TEST_CASE("lbp is 0 where the center dominates its neighborhood") {
  GrayImage img(3, 3, {1, 2, 3, 4, 200, 5, 6, 7, 8});
  CHECK(lbp_plane(img)[4] == 0);
}

TEST_CASE("lbp hand fixture evaluates to 170") {
  CHECK(lbp_plane(lbp_fixture_3x3())[4] == 170);
}

TEST_CASE("lbp rejects images smaller than 3x3") {
  CHECK_THROWS_AS(lbp_plane(GrayImage(2, 3)), SizeError);
  CHECK_THROWS_AS(lbp_plane(GrayImage(3, 2)), SizeError);
}

TEST_CASE("lbp is invariant under strictly increasing pixel maps") {
  SplitMix64 rng(20260808);
  for (int trial = 0; trial < 200; ++trial) {
    constexpr int kMaxValue = 100;
    const GrayImage img = fsk::testing::random_gray(
        8, 8, rng.next_u64(), kMaxValue);
    const auto mapping = random_monotone_map(rng, kMaxValue);

    GrayImage mapped(8, 8);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      mapped.pixels[i] = mapping[img.pixels[i]];
    }
    CHECK(lbp_plane(img) == lbp_plane(mapped));
  }
}

TEST_CASE("hog of a constant image is all zero") {
  GrayImage img(16, 16, std::vector<std::uint8_t>(256, 137));
  const auto plane = hog_plane(img);
  CHECK(std::all_of(plane.begin(), plane.end(),
                    [](std::uint8_t v) { return v == 0; }));
}

TEST_CASE("hog edge cells outscore flat cells on a step edge") {
  HogConfig cfg;
  cfg.cell_size = 4;
  const GrayImage img = vertical_step_edge(16);
  const auto plane = hog_plane(img, cfg);

  // Gradient support is columns 7 and 8 -> cell columns 1 and 2.
  for (int cy = 0; cy < 4; ++cy) {
    const auto value_at_cell = [&](int cx) {
      return plane[(cy * 4 + 2) * 16 + (cx * 4 + 2)];
    };
    CHECK(value_at_cell(1) > value_at_cell(0));
    CHECK(value_at_cell(2) > value_at_cell(3));
    CHECK(value_at_cell(0) == 0);
  }
}

TEST_CASE("hog plane is preserved under 90 degree rotation of a step edge") {
  HogConfig cfg;
  cfg.cell_size = 4;
  const GrayImage img = vertical_step_edge(16);
  const GrayImage rotated = rotate90(img);

  const auto plane = hog_plane(img, cfg);
  const auto rotated_plane = hog_plane(rotated, cfg);

  GrayImage plane_img(16, 16, plane);
  const GrayImage expected = rotate90(plane_img);
  CHECK(rotated_plane == expected.pixels);
}

TEST_CASE("hog is invariant to adding a constant to all pixels") {
  const GrayImage img = fsk::testing::random_gray(24, 16, 42, 150);
  GrayImage shifted = img;
  for (auto& p : shifted.pixels) p = static_cast<std::uint8_t>(p + 100);
  CHECK(hog_plane(img) == hog_plane(shifted));
}

TEST_CASE("hog rejects images smaller than one cell") {
  CHECK_THROWS_AS(hog_plane(GrayImage(4, 4)), SizeError);  // default cell 8
  HogConfig bad;
  bad.cell_size = 1;
  CHECK_THROWS_AS(hog_plane(GrayImage(8, 8), bad), SizeError);
}

TEST_CASE("compose_savp of a white image") {
  const auto desc = compose_savp(solid(16, 16, 255, 255, 255));
  CHECK(desc.width == 16);
  CHECK(desc.height == 16);
  CHECK(std::all_of(desc.gray.begin(), desc.gray.end(),
                    [](std::uint8_t v) { return v == 255; }));
  CHECK(std::all_of(desc.hog.begin(), desc.hog.end(),
                    [](std::uint8_t v) { return v == 0; }));
  // Interior LBP is 255, border 0.
  CHECK(desc.lbp[17] == 255);
  CHECK(desc.lbp[0] == 0);
}

TEST_CASE("compose_savp preserves the input shape") {
  const auto img = fsk::testing::random_image(24, 16, 8);
  const auto desc = compose_savp(img);
  CHECK(desc.width == 24);
  CHECK(desc.height == 16);
  CHECK(desc.lbp.size() == 24 * 16);
  CHECK(desc.gray.size() == 24 * 16);
  CHECK(desc.hog.size() == 24 * 16);
}

TEST_CASE("lbp is local: embedded fixture keeps its code") {
  // Paste the 3x3 fixture into a larger flat canvas; the embedded center
  // must still read 170.
  const GrayImage patch = lbp_fixture_3x3();
  RasterImage canvas = solid(16, 16, 90, 90, 90);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 3; ++x) {
      const std::uint8_t v = patch.at(x, y);
      canvas.at(6 + x, 6 + y, 0) = v;
      canvas.at(6 + x, 6 + y, 1) = v;
      canvas.at(6 + x, 6 + y, 2) = v;
    }
  }
  const auto desc = compose_savp(canvas);
  CHECK(desc.lbp[7 * 16 + 7] == 170);
}

TEST_CASE("descriptor triple round-trips through pgm files") {
  fsk::testing::TempDir dir("savp");
  const auto desc = compose_savp(fsk::testing::random_image(16, 16, 21));
  save_descriptor(dir.path().string(), "sample", desc);
  CHECK(load_descriptor(dir.path().string(), "sample") == desc);
}

}  // TEST_SUITE
