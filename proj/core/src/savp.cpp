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
#include "fsk/savp.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "fsk/error.hpp"

namespace fsk {

namespace {

std::uint8_t round_half_up_u8(double v) {
  const double r = std::floor(v + 0.5);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

// Block origins along one axis: every `stride` cells, with the final block
// flushed to the edge so no cell is left uncovered.
std::vector<int> block_starts(int n_cells, int block, int stride) {
  std::vector<int> starts;
  const int last = n_cells - block;
  for (int s = 0; s <= last; s += stride) starts.push_back(s);
  if (starts.empty() || starts.back() != last) starts.push_back(last);
  return starts;
}

}  // namespace

void HogConfig::validate() const {
  if (cell_size < 2) throw SizeError("hog cell_size must be >= 2");
  if (bins < 2) throw SizeError("hog bins must be >= 2");
  if (block_size < 1) throw SizeError("hog block_size must be >= 1");
  if (block_stride < 1) throw SizeError("hog block_stride must be >= 1");
  if (norm_clip <= 0.0) throw SizeError("hog norm_clip must be positive");
}

GrayImage to_gray(const RasterImage& img) {
  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double luma = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
                          0.114 * img.at(x, y, 2);
      out.at(x, y) = round_half_up_u8(luma);
    }
  }
  return out;
}

std::vector<std::uint8_t> lbp_plane(const GrayImage& gray) {
  if (gray.width < 3 || gray.height < 3) {
    throw SizeError("lbp needs an image of at least 3x3, got " +
                    std::to_string(gray.width) + "x" +
                    std::to_string(gray.height));
  }
  // Clockwise from the top-left neighbor.
  static constexpr int kDx[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
  static constexpr int kDy[8] = {-1, -1, -1, 0, 1, 1, 1, 0};

  std::vector<std::uint8_t> plane(
      static_cast<std::size_t>(gray.width) * gray.height, 0);
  for (int y = 1; y + 1 < gray.height; ++y) {
    for (int x = 1; x + 1 < gray.width; ++x) {
      const int center = gray.at(x, y);
      unsigned code = 0;
      for (int i = 0; i < 8; ++i) {
        if (gray.at(x + kDx[i], y + kDy[i]) >= center) code |= 1u << i;
      }
      plane[static_cast<std::size_t>(y) * gray.width + x] =
          static_cast<std::uint8_t>(code);
    }
  }
  return plane;
}

std::vector<std::uint8_t> hog_plane(const GrayImage& gray,
                                    const HogConfig& cfg) {
  cfg.validate();
  const int w = gray.width;
  const int h = gray.height;
  if (w < cfg.cell_size || h < cfg.cell_size) {
    throw SizeError("hog needs an image of at least " +
                    std::to_string(cfg.cell_size) + "x" +
                    std::to_string(cfg.cell_size) + ", got " +
                    std::to_string(w) + "x" + std::to_string(h));
  }

  const int ncx = w / cfg.cell_size;
  const int ncy = h / cfg.cell_size;
  const int bins = cfg.bins;
  const double bin_width = 180.0 / bins;

  // Per-cell orientation histograms. Pixels past the last full cell fold
  // into that cell.
  std::vector<double> hist(static_cast<std::size_t>(ncx) * ncy * bins, 0.0);
  auto cell_of = [&](int coord, int n_cells) {
    return std::min(coord / cfg.cell_size, n_cells - 1);
  };
  auto sample = [&](int x, int y) {
    return static_cast<double>(
        gray.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)));
  };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = sample(x + 1, y) - sample(x - 1, y);
      const double gy = sample(x, y + 1) - sample(x, y - 1);
      const double mag = std::sqrt(gx * gx + gy * gy);
      if (mag == 0.0) continue;

      double deg = std::atan2(gy, gx) * (180.0 / 3.14159265358979323846);
      if (deg < 0.0) deg += 180.0;       // fold to [0, 180)
      if (deg >= 180.0) deg -= 180.0;

      // Split the vote between the two nearest bin centers, wrapping at
      // the 0/180 seam.
      const double pos = deg / bin_width - 0.5;
      int lo = static_cast<int>(std::floor(pos));
      const double frac = pos - lo;
      const int bin_lo = ((lo % bins) + bins) % bins;
      const int bin_hi = (bin_lo + 1) % bins;

      const std::size_t base =
          (static_cast<std::size_t>(cell_of(y, ncy)) * ncx + cell_of(x, ncx)) *
          bins;
      hist[base + bin_lo] += (1.0 - frac) * mag;
      hist[base + bin_hi] += frac * mag;
    }
  }

  // Normalize per block and accumulate each cell's share. When the cell
  // grid is smaller than a block, the whole grid acts as one block.
  const int bsx = std::min(cfg.block_size, ncx);
  const int bsy = std::min(cfg.block_size, ncy);
  std::vector<double> cell_value(static_cast<std::size_t>(ncx) * ncy, 0.0);
  std::vector<int> cell_blocks(static_cast<std::size_t>(ncx) * ncy, 0);
  std::vector<double> block(static_cast<std::size_t>(bsx) * bsy * bins);

  for (int by : block_starts(ncy, bsy, cfg.block_stride)) {
    for (int bx : block_starts(ncx, bsx, cfg.block_stride)) {
      std::size_t k = 0;
      for (int cy = by; cy < by + bsy; ++cy) {
        for (int cx = bx; cx < bx + bsx; ++cx) {
          const std::size_t base =
              (static_cast<std::size_t>(cy) * ncx + cx) * bins;
          for (int b = 0; b < bins; ++b) block[k++] = hist[base + b];
        }
      }
      double norm2 = 0.0;
      for (double v : block) norm2 += v * v;
      if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& v : block) v = std::min(v * inv, cfg.norm_clip);
        norm2 = 0.0;
        for (double v : block) norm2 += v * v;
        if (norm2 > 0.0) {
          const double inv2 = 1.0 / std::sqrt(norm2);
          for (double& v : block) v *= inv2;
        }
      } else {
        std::fill(block.begin(), block.end(), 0.0);
      }

      k = 0;
      for (int cy = by; cy < by + bsy; ++cy) {
        for (int cx = bx; cx < bx + bsx; ++cx) {
          double cell_sum = 0.0;
          for (int b = 0; b < bins; ++b) cell_sum += block[k++];
          const std::size_t c = static_cast<std::size_t>(cy) * ncx + cx;
          cell_value[c] += cell_sum;
          cell_blocks[c] += 1;
        }
      }
    }
  }

  double max_value = 0.0;
  for (std::size_t c = 0; c < cell_value.size(); ++c) {
    cell_value[c] /= std::max(cell_blocks[c], 1);
    max_value = std::max(max_value, cell_value[c]);
  }

  std::vector<std::uint8_t> plane(static_cast<std::size_t>(w) * h, 0);
  if (max_value == 0.0) return plane;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t c =
          static_cast<std::size_t>(cell_of(y, ncy)) * ncx + cell_of(x, ncx);
      plane[static_cast<std::size_t>(y) * w + x] =
          round_half_up_u8(255.0 * cell_value[c] / max_value);
    }
  }
  return plane;
}

DescriptorImage compose_savp(const RasterImage& img, const HogConfig& cfg) {
  GrayImage gray = to_gray(img);
  DescriptorImage out;
  out.width = img.width;
  out.height = img.height;
  out.lbp = lbp_plane(gray);
  out.hog = hog_plane(gray, cfg);
  out.gray = std::move(gray.pixels);
  return out;
}

void save_descriptor(const std::string& dir, const std::string& stem,
                     const DescriptorImage& desc) {
  namespace fs = std::filesystem;
  const fs::path base = fs::path(dir) / stem;
  save_pgm(base.string() + ".lbp.pgm",
           GrayImage(desc.width, desc.height, desc.lbp));
  save_pgm(base.string() + ".gray.pgm",
           GrayImage(desc.width, desc.height, desc.gray));
  save_pgm(base.string() + ".hog.pgm",
           GrayImage(desc.width, desc.height, desc.hog));
}

DescriptorImage load_descriptor(const std::string& dir,
                                const std::string& stem) {
  namespace fs = std::filesystem;
  const fs::path base = fs::path(dir) / stem;
  GrayImage lbp = load_pgm(base.string() + ".lbp.pgm");
  GrayImage gray = load_pgm(base.string() + ".gray.pgm");
  GrayImage hog = load_pgm(base.string() + ".hog.pgm");
  if (gray.width != lbp.width || gray.height != lbp.height ||
      hog.width != lbp.width || hog.height != lbp.height) {
    throw SizeError("descriptor planes for " + stem + " disagree in size");
  }
  DescriptorImage out;
  out.width = lbp.width;
  out.height = lbp.height;
  out.lbp = std::move(lbp.pixels);
  out.gray = std::move(gray.pixels);
  out.hog = std::move(hog.pixels);
  return out;
}

}  // namespace fsk
