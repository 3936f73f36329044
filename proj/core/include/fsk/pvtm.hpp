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
#ifndef FSK_PVTM_HPP_
#define FSK_PVTM_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fsk/image.hpp"
#include "fsk/tokens.hpp"

namespace fsk {

enum class MaskMode : std::uint8_t {
  kBernoulli,   // each non-retained token masked independently w.p. p
  kFixedCount,  // exactly round(p * |non-retained|) tokens masked
};

enum class MaskStyle : std::uint8_t {
  kDrop,  // masked rows removed, order of the rest preserved
  kZero,  // masked rows set to zero, N unchanged
};

struct MaskConfig {
  double retain_fraction = 0.10;  // k: top importance share never masked
  double mask_probability = 0.05; // p: masking rate among the rest
  MaskMode mode = MaskMode::kBernoulli;
  std::uint64_t seed = 0;

  void validate() const;
};

// Outcome of prompt-guided token selection. `retained`, `masked` and `kept`
// partition [0, N); each list is sorted ascending. `importance` is the
// softmax of prompt similarities and sums to 1.
struct MaskPlan {
  std::vector<double> importance;
  std::vector<int> retained;
  std::vector<int> masked;
  std::vector<int> kept;
  MaskConfig config;
  std::uint64_t seed = 0;

  int n_tokens() const { return static_cast<int>(importance.size()); }
};

// Stacks rgb rows above sav rows. Both operands must share D; rows keep
// their values and acquire tags (rgb first, then sav).
TokenMatrix concat_vision(const TokenMatrix& rgb, const TokenMatrix& sav);

// Arithmetic mean over prompt tokens, per dimension.
PooledPrompt pool_prompt(const TokenMatrix& prompt_tokens);

// v . p / (|v| |p|). Throws DegenerateInputError if either norm is zero.
double cosine_similarity(std::span<const double> v, std::span<const double> p);

// Importance of each vision token: softmax over cosine similarities with
// the pooled prompt. Zero-norm vision tokens enter the softmax with
// similarity -1; a zero pooled prompt is an error since no direction
// exists to score against.
std::vector<double> importance(const TokenMatrix& vision,
                               const PooledPrompt& prompt);

// Ranks tokens by importance, protects the ceil(k*N) most important
// (ties broken by lower index), then masks among the remainder according
// to cfg.mode / cfg.seed. Deterministic given identical inputs and seed.
MaskPlan plan_mask(const TokenMatrix& vision, const PooledPrompt& prompt,
                   const MaskConfig& cfg);

// Applies a plan. kDrop removes masked rows; kZero zeroes them in place.
TokenMatrix apply_mask(const TokenMatrix& vision, const MaskPlan& plan,
                       MaskStyle style);

// Renders an importance vector onto a grid_w x grid_h grid, row-major,
// linearly rescaled so the maximum maps to 255. All-equal values render as
// a full-white grid; an all-zero vector stays black.
GrayImage importance_map(std::span<const double> importance, int grid_w,
                         int grid_h);
GrayImage importance_map(const MaskPlan& plan, int grid_w, int grid_h);

// JSON serialization of a plan:
// {importance:[...], retained:[...], masked:[...], kept:[...], seed, config}.
std::string mask_plan_to_json(const MaskPlan& plan);
MaskPlan mask_plan_from_json(const std::string& json_text);

}  // namespace fsk

#endif  // FSK_PVTM_HPP_
