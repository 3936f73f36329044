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
#ifndef FSK_SAVP_HPP_
#define FSK_SAVP_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "fsk/image.hpp"

namespace fsk {

// Spoof-aware descriptor image: three aligned planes computed from one RGB
// input. Channel order is fixed as (lbp, gray, hog).
struct DescriptorImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> lbp;
  std::vector<std::uint8_t> gray;
  std::vector<std::uint8_t> hog;

  bool operator==(const DescriptorImage&) const = default;
};

// HOG parameters. The descriptor is rendered back to a per-cell energy
// plane (see hog_plane), not kept as a feature vector.
struct HogConfig {
  int cell_size = 8;        // pixels per cell side
  int bins = 9;             // unsigned orientation bins over [0, 180)
  int block_size = 2;       // cells per block side
  int block_stride = 1;     // cells between block origins
  double norm_clip = 0.2;   // L2-Hys clipping threshold

  void validate() const;
};

// Luma conversion: round(0.299 R + 0.587 G + 0.114 B), round-half-up.
GrayImage to_gray(const RasterImage& img);

// 8-neighbor radius-1 local binary pattern. Neighbor bit i starts at the
// top-left neighbor and proceeds clockwise; s(x) = 1 iff x >= 0. Border
// pixels (incomplete neighborhood) are 0. Requires width, height >= 3.
std::vector<std::uint8_t> lbp_plane(const GrayImage& gray);

// Cell-energy rendering of a dense HOG:
//   gradients    central differences, replicated borders
//   orientation  folded to [0, 180), magnitude-weighted votes split
//                linearly between the two nearest bin centers (wrapping)
//   blocks       L2-Hys normalized (unit L2, clip, renormalize)
//   plane value  per cell, sum of normalized bins averaged over the blocks
//                containing the cell, rescaled so the global max is 255.
// A constant image has no gradients and yields an all-zero plane.
std::vector<std::uint8_t> hog_plane(const GrayImage& gray,
                                    const HogConfig& cfg = HogConfig{});

// Full spoof-aware composition: (lbp, gray, hog) planes of the luma image,
// all at input resolution.
DescriptorImage compose_savp(const RasterImage& img,
                             const HogConfig& cfg = HogConfig{});

// Serializes the three planes as <stem>.lbp.pgm / <stem>.gray.pgm /
// <stem>.hog.pgm inside `dir`.
void save_descriptor(const std::string& dir, const std::string& stem,
                     const DescriptorImage& desc);
DescriptorImage load_descriptor(const std::string& dir,
                                const std::string& stem);

}  // namespace fsk

#endif  // FSK_SAVP_HPP_
