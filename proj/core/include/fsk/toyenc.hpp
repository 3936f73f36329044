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
#ifndef FSK_TOYENC_HPP_
#define FSK_TOYENC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "fsk/image.hpp"
#include "fsk/pvtm.hpp"
#include "fsk/savp.hpp"
#include "fsk/tokens.hpp"

namespace fsk {

// Fixed random patch embedding. The projection matrix is drawn once from
// the seed (splitmix64 + Box-Muller, entries N(0, 1/fan_in)) and never
// trained; pixel values are scaled to [0, 1] before projection, so an
// all-zero image embeds to all-zero tokens.
struct PatchEmbedConfig {
  int patch_size = 16;
  int dim = 64;
  std::uint64_t seed = 0;
  // When set, images whose sides are not multiples of patch_size are
  // nearest-neighbor resized to the nearest multiple first; otherwise such
  // images are rejected.
  bool allow_resize = false;

  void validate() const;
};

// Single affine map V -> V W + b, the trainable alignment stage.
struct Projector {
  int d_in = 0;
  int d_out = 0;
  std::vector<double> weight;  // d_in x d_out, row-major
  std::vector<double> bias;    // d_out

  static Projector identity(int dim);
  static Projector random(int d_in, int d_out, std::uint64_t seed);
};

// Mean-pool + affine + softmax decision head standing in for the language
// model's verdict. class_count is 2 (bonafide/spoof) or 13 (12 attack
// classes + unparseable bucket).
struct ToyHead {
  int dim = 0;
  int class_count = 0;
  std::vector<double> weight;  // dim x class_count, row-major
  std::vector<double> bias;    // class_count

  static ToyHead zeros(int dim, int class_count);
  static ToyHead random(int dim, int class_count, std::uint64_t seed);
};

// One token per non-overlapping patch, row-major over the patch grid.
// A patch flattens pixel-major with channels interleaved; DescriptorImage
// channels flatten in (lbp, gray, hog) order.
TokenMatrix patch_embed(const RasterImage& img, const PatchEmbedConfig& cfg);
TokenMatrix patch_embed(const DescriptorImage& desc,
                        const PatchEmbedConfig& cfg);

// Hash-seeded prompt embedding: tokens from fsk::tokenize, each embedded as
// a Gaussian vector seeded by FNV-1a of the token text, so identical words
// always share a row. Throws on prompts with no tokens.
TokenMatrix embed_prompt(const std::string& text, const PatchEmbedConfig& cfg);

TokenMatrix project(const TokenMatrix& tokens, const Projector& proj);

// Mean-pool, affine map, softmax. Output sums to 1.
std::vector<double> classify(const TokenMatrix& v_align, const ToyHead& head);

struct TrainSample {
  TokenMatrix tokens;  // encoder output, pre-projection
  int label = 0;
};

// One full-batch gradient descent step on the mean cross-entropy of the
// projector + head composition. Returns the loss at the pre-update
// parameters. lr must be non-negative; lr == 0 evaluates the loss without
// touching the parameters.
double train_step(const std::vector<TrainSample>& batch, Projector& proj,
                  ToyHead& head, double lr);

// Loss and analytic parameter gradients, exposed for gradient checking.
struct TrainGradients {
  double loss = 0.0;
  std::vector<double> d_proj_weight;
  std::vector<double> d_proj_bias;
  std::vector<double> d_head_weight;
  std::vector<double> d_head_bias;
};
TrainGradients compute_gradients(const std::vector<TrainSample>& batch,
                                 const Projector& proj, const ToyHead& head);

struct PipelineConfig {
  PatchEmbedConfig embed;
  HogConfig hog;
  MaskConfig mask;
  MaskStyle mask_style = MaskStyle::kDrop;
};

struct PipelineResult {
  std::vector<double> probabilities;
  MaskPlan plan;
  int rgb_tokens = 0;
  int sav_tokens = 0;
  int grid_w = 0;  // patch grid of the (possibly resized) input
  int grid_h = 0;
  int pre_mask_tokens = 0;
  int post_mask_tokens = 0;
  int v_align_tokens = 0;
  int v_align_dim = 0;
};

// Full composition: SAVP planes -> patch embedding of the RGB image and of
// the descriptor image (the SAV encoder uses a seed derived from
// cfg.embed.seed) -> concat -> prompt-guided masking -> projection ->
// classification. Every stage's shape is reported.
PipelineResult run_pipeline(const RasterImage& img, const std::string& prompt,
                            const PipelineConfig& cfg, const Projector& proj,
                            const ToyHead& head);

// Parameter persistence: weights/biases in TOKMAT files next to a JSON
// manifest recording shapes and file names.
void save_model(const std::string& path_stem, const Projector& proj,
                const ToyHead& head);
void load_model(const std::string& path_stem, Projector* proj, ToyHead* head);

// Deterministic two-class image set for the ablation harness and training
// tests: class 0 renders dark noisy faces, class 1 bright ones, linearly
// separable after mean pooling.
struct SyntheticSample {
  RasterImage image;
  int label = 0;
};
std::vector<SyntheticSample> make_synthetic_faces(int count, int width,
                                                  int height,
                                                  std::uint64_t seed);

}  // namespace fsk

#endif  // FSK_TOYENC_HPP_
