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
#include "fsk/image.hpp"

#include <cstdio>
#include <fstream>
#include <limits>

#include "fsk/error.hpp"

namespace fsk {

namespace {

constexpr std::int64_t kMaxPixels = 1 << 28;  // 256M pixels, sanity bound

void check_dims(int w, int h) {
  if (w <= 0 || h <= 0) {
    throw SizeError("image dimensions must be positive, got " +
                    std::to_string(w) + "x" + std::to_string(h));
  }
  if (static_cast<std::int64_t>(w) * h > kMaxPixels) {
    throw SizeError("image dimensions unreasonably large: " +
                    std::to_string(w) + "x" + std::to_string(h));
  }
}

// Incremental netpbm header scanner. Tracks the byte offset for error
// reporting.
class PnmCursor {
 public:
  explicit PnmCursor(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  bool eof() const { return pos_ >= bytes_.size(); }

  std::uint8_t byte() const { return bytes_[pos_]; }
  void advance() { ++pos_; }

  // Skips whitespace and '#' comments (comment runs to end of line).
  void skip_separators() {
    while (!eof()) {
      const std::uint8_t c = byte();
      if (c == '#') {
        while (!eof() && byte() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' ||
                 c == '\f' || c == '\v') {
        advance();
      } else {
        return;
      }
    }
  }

  int read_int(const char* field) {
    skip_separators();
    if (eof()) {
      throw ParseError(std::string("unexpected end of header while reading ") +
                           field,
                       pos_);
    }
    if (byte() < '0' || byte() > '9') {
      throw ParseError(std::string("expected digit for ") + field, pos_);
    }
    long value = 0;
    while (!eof() && byte() >= '0' && byte() <= '9') {
      value = value * 10 + (byte() - '0');
      if (value > std::numeric_limits<int>::max()) {
        throw ParseError(std::string(field) + " overflows", pos_);
      }
      advance();
    }
    return static_cast<int>(value);
  }

  // Exactly one whitespace byte separates the maxval from the raster.
  void expect_single_whitespace() {
    if (eof()) throw ParseError("missing separator before raster data", pos_);
    const std::uint8_t c = byte();
    if (c != ' ' && c != '\t' && c != '\r' && c != '\n') {
      throw ParseError("expected single whitespace before raster data", pos_);
    }
    advance();
  }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> decode_pnm(const std::vector<std::uint8_t>& bytes,
                                     char expected_magic, int channels,
                                     int* out_w, int* out_h) {
  PnmCursor cur(bytes);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != expected_magic) {
    std::string found = bytes.size() >= 2
                            ? std::string(1, static_cast<char>(bytes[0])) +
                                  static_cast<char>(bytes[1])
                            : std::string("<empty>");
    throw ParseError("unsupported magic \"" + found + "\", want P" +
                         std::string(1, expected_magic),
                     0);
  }
  cur.advance();
  cur.advance();

  const int w = cur.read_int("width");
  const int h = cur.read_int("height");
  const int maxval = cur.read_int("maxval");
  if (w <= 0 || h <= 0) {
    throw ParseError("non-positive image dimensions in header", cur.offset());
  }
  if (maxval != 255) {
    throw ParseError("unsupported maxval " + std::to_string(maxval) +
                         ", want 255",
                     cur.offset());
  }
  cur.expect_single_whitespace();

  const std::size_t need =
      static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * channels;
  if (bytes.size() - cur.offset() < need) {
    throw ParseError("truncated raster: need " + std::to_string(need) +
                         " bytes, have " +
                         std::to_string(bytes.size() - cur.offset()),
                     bytes.size());
  }
  *out_w = w;
  *out_h = h;
  return std::vector<std::uint8_t>(bytes.begin() + cur.offset(),
                                   bytes.begin() + cur.offset() + need);
}

std::vector<std::uint8_t> encode_pnm(char magic, int w, int h,
                                     const std::vector<std::uint8_t>& raster) {
  char header[48];
  const int n = std::snprintf(header, sizeof header, "P%c\n%d %d\n255\n",
                              magic, w, h);
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(n) + raster.size());
  out.insert(out.end(), header, header + n);
  out.insert(out.end(), raster.begin(), raster.end());
  return out;
}

}  // namespace

RasterImage::RasterImage(int w, int h) : width(w), height(h) {
  check_dims(w, h);
  pixels.assign(static_cast<std::size_t>(3) * w * h, 0);
}

RasterImage::RasterImage(int w, int h, std::vector<std::uint8_t> data)
    : width(w), height(h), pixels(std::move(data)) {
  check_dims(w, h);
  if (pixels.size() != static_cast<std::size_t>(3) * w * h) {
    throw SizeError("pixel buffer size " + std::to_string(pixels.size()) +
                    " does not match 3*" + std::to_string(w) + "*" +
                    std::to_string(h));
  }
}

GrayImage::GrayImage(int w, int h) : width(w), height(h) {
  check_dims(w, h);
  pixels.assign(static_cast<std::size_t>(w) * h, 0);
}

GrayImage::GrayImage(int w, int h, std::vector<std::uint8_t> data)
    : width(w), height(h), pixels(std::move(data)) {
  check_dims(w, h);
  if (pixels.size() != static_cast<std::size_t>(w) * h) {
    throw SizeError("pixel buffer size " + std::to_string(pixels.size()) +
                    " does not match " + std::to_string(w) + "*" +
                    std::to_string(h));
  }
}

BBox::BBox(int x1_, int y1_, int x2_, int y2_)
    : x1(x1_), y1(y1_), x2(x2_), y2(y2_) {
  if (x1 < 0 || y1 < 0 || x1 >= x2 || y1 >= y2) {
    throw BoundsError("invalid box [" + std::to_string(x1) + ", " +
                      std::to_string(y1) + ", " + std::to_string(x2) + ", " +
                      std::to_string(y2) + "]");
  }
}

RasterImage read_ppm(const std::vector<std::uint8_t>& bytes) {
  int w = 0;
  int h = 0;
  auto raster = decode_pnm(bytes, '6', 3, &w, &h);
  return RasterImage(w, h, std::move(raster));
}

std::vector<std::uint8_t> write_ppm(const RasterImage& img) {
  return encode_pnm('6', img.width, img.height, img.pixels);
}

GrayImage read_pgm(const std::vector<std::uint8_t>& bytes) {
  int w = 0;
  int h = 0;
  auto raster = decode_pnm(bytes, '5', 1, &w, &h);
  return GrayImage(w, h, std::move(raster));
}

std::vector<std::uint8_t> write_pgm(const GrayImage& img) {
  return encode_pnm('5', img.width, img.height, img.pixels);
}

RasterImage crop(const RasterImage& img, const BBox& box) {
  if (box.x2 > img.width || box.y2 > img.height) {
    throw BoundsError("crop box [" + std::to_string(box.x1) + ", " +
                      std::to_string(box.y1) + ", " + std::to_string(box.x2) +
                      ", " + std::to_string(box.y2) + "] exceeds " +
                      std::to_string(img.width) + "x" +
                      std::to_string(img.height) + " image");
  }
  RasterImage out(box.width(), box.height());
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = img.at(box.x1 + x, box.y1 + y, c);
      }
    }
  }
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on " + path);
  return bytes;
}

void write_file_bytes(const std::string& path,
                      const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure on " + path);
}

RasterImage load_ppm(const std::string& path) {
  try {
    return read_ppm(read_file_bytes(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_ppm(const std::string& path, const RasterImage& img) {
  write_file_bytes(path, write_ppm(img));
}

GrayImage load_pgm(const std::string& path) {
  try {
    return read_pgm(read_file_bytes(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_pgm(const std::string& path, const GrayImage& img) {
  write_file_bytes(path, write_pgm(img));
}

}  // namespace fsk
