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
#ifndef FSK_IMAGE_HPP_
#define FSK_IMAGE_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace fsk {

// 8-bit RGB raster, row-major, interleaved (r, g, b) per pixel. Immutable
// by convention: operations return new images.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // size = 3 * width * height

  RasterImage() = default;
  RasterImage(int w, int h);
  RasterImage(int w, int h, std::vector<std::uint8_t> data);

  std::uint8_t at(int x, int y, int channel) const {
    return pixels[static_cast<std::size_t>(3) * (static_cast<std::size_t>(y) * width + x) + channel];
  }
  std::uint8_t& at(int x, int y, int channel) {
    return pixels[static_cast<std::size_t>(3) * (static_cast<std::size_t>(y) * width + x) + channel];
  }

  bool operator==(const RasterImage&) const = default;
};

// Single-channel 8-bit raster, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // size = width * height

  GrayImage() = default;
  GrayImage(int w, int h);
  GrayImage(int w, int h, std::vector<std::uint8_t> data);

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }

  bool operator==(const GrayImage&) const = default;
};

// Axis-aligned box, inclusive-exclusive: covers [x1, x2) x [y1, y2).
// Width is x2 - x1 with no off-by-one.
struct BBox {
  int x1 = 0;
  int y1 = 0;
  int x2 = 0;
  int y2 = 0;

  BBox() = default;
  // Throws BoundsError unless 0 <= x1 < x2 and 0 <= y1 < y2.
  BBox(int x1, int y1, int x2, int y2);

  int width() const { return x2 - x1; }
  int height() const { return y2 - y1; }
  std::int64_t area() const {
    return static_cast<std::int64_t>(width()) * height();
  }

  bool operator==(const BBox&) const = default;
};

// Decodes a binary PPM (magic "P6", maxval 255). Header comments ('#' to
// end of line) are honored. Throws ParseError naming the byte offset on
// malformed headers, maxval != 255, or truncated raster data.
RasterImage read_ppm(const std::vector<std::uint8_t>& bytes);

// Canonical P6 encoding: "P6\n<w> <h>\n255\n" followed by the raster.
// read_ppm(write_ppm(img)) == img, bit-exact.
std::vector<std::uint8_t> write_ppm(const RasterImage& img);

// Binary PGM (P5) counterparts, same conventions.
GrayImage read_pgm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> write_pgm(const GrayImage& img);

// Extracts the sub-image covered by `box`. Throws BoundsError if the box
// extends past the image.
RasterImage crop(const RasterImage& img, const BBox& box);

// File helpers (throw IoError on filesystem failures).
RasterImage load_ppm(const std::string& path);
void save_ppm(const std::string& path, const RasterImage& img);
GrayImage load_pgm(const std::string& path);
void save_pgm(const std::string& path, const GrayImage& img);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path,
                      const std::vector<std::uint8_t>& bytes);

}  // namespace fsk

#endif  // FSK_IMAGE_HPP_
