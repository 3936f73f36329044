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
#include "fsk/toyenc.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "fsk/error.hpp"
#include "fsk/rng.hpp"
#include "fsk/text.hpp"

namespace fsk {

namespace {

std::vector<double> gaussian_vector(std::uint64_t seed, std::size_t count,
                                    double scale) {
  SplitMix64 rng(seed);
  std::vector<double> out(count);
  for (double& v : out) v = rng.next_gaussian() * scale;
  return out;
}

int nearest_multiple(int value, int step) {
  const int m = (value + step / 2) / step;
  return std::max(m, 1) * step;
}

// Generic patch embedding over a 3-channel pixel accessor.
template <typename PixelAt>
TokenMatrix embed_grid(int width, int height, PixelAt&& pixel_at,
                       const PatchEmbedConfig& cfg, TokenTag tag) {
  cfg.validate();
  const int ps = cfg.patch_size;
  if (width % ps != 0 || height % ps != 0) {
    throw SizeError("image " + std::to_string(width) + "x" +
                    std::to_string(height) + " is not a multiple of patch " +
                    std::to_string(ps) + " (resize not enabled)");
  }
  const int nx = width / ps;
  const int ny = height / ps;
  const int fan_in = 3 * ps * ps;
  const std::vector<double> weight = gaussian_vector(
      cfg.seed, static_cast<std::size_t>(fan_in) * cfg.dim,
      1.0 / std::sqrt(static_cast<double>(fan_in)));

  TokenMatrix out(nx * ny, cfg.dim);
  std::vector<double> patch(static_cast<std::size_t>(fan_in));
  for (int py = 0; py < ny; ++py) {
    for (int px = 0; px < nx; ++px) {
      std::size_t k = 0;
      for (int y = 0; y < ps; ++y) {
        for (int x = 0; x < ps; ++x) {
          for (int c = 0; c < 3; ++c) {
            patch[k++] = pixel_at(px * ps + x, py * ps + y, c) / 255.0;
          }
        }
      }
      auto row = out.row(py * nx + px);
      for (int j = 0; j < cfg.dim; ++j) {
        double acc = 0.0;
        for (int i = 0; i < fan_in; ++i) {
          acc += patch[i] * weight[static_cast<std::size_t>(i) * cfg.dim + j];
        }
        row[j] = acc;
      }
    }
  }
  out.set_uniform_tag(tag);
  return out;
}

RasterImage resize_nearest(const RasterImage& img, int new_w, int new_h) {
  RasterImage out(new_w, new_h);
  for (int y = 0; y < new_h; ++y) {
    const int sy = std::min(
        static_cast<int>((y + 0.5) * img.height / new_h), img.height - 1);
    for (int x = 0; x < new_w; ++x) {
      const int sx = std::min(
          static_cast<int>((x + 0.5) * img.width / new_w), img.width - 1);
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(sx, sy, c);
    }
  }
  return out;
}

std::vector<double> softmax(std::vector<double> logits) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double denom = 0.0;
  for (double& v : logits) {
    v = std::exp(v - max_logit);
    denom += v;
  }
  for (double& v : logits) v /= denom;
  return logits;
}

// Mean over token rows; with an affine stage downstream this equals
// projecting the mean, which keeps gradients cheap.
std::vector<double> mean_pool(const TokenMatrix& tokens) {
  std::vector<double> pooled(static_cast<std::size_t>(tokens.dim()), 0.0);
  for (int i = 0; i < tokens.n_tokens(); ++i) {
    const auto row = tokens.row(i);
    for (int j = 0; j < tokens.dim(); ++j) pooled[j] += row[j];
  }
  for (double& v : pooled) v /= tokens.n_tokens();
  return pooled;
}

}  // namespace

void PatchEmbedConfig::validate() const {
  if (patch_size < 1) throw SizeError("patch_size must be >= 1");
  if (dim < 1) throw SizeError("embedding dim must be >= 1");
}

Projector Projector::identity(int dim) {
  Projector p;
  p.d_in = dim;
  p.d_out = dim;
  p.weight.assign(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    p.weight[static_cast<std::size_t>(i) * dim + i] = 1.0;
  }
  p.bias.assign(static_cast<std::size_t>(dim), 0.0);
  return p;
}

Projector Projector::random(int d_in, int d_out, std::uint64_t seed) {
  if (d_in < 1 || d_out < 1) throw SizeError("projector dims must be >= 1");
  Projector p;
  p.d_in = d_in;
  p.d_out = d_out;
  p.weight = gaussian_vector(seed, static_cast<std::size_t>(d_in) * d_out,
                             1.0 / std::sqrt(static_cast<double>(d_in)));
  p.bias.assign(static_cast<std::size_t>(d_out), 0.0);
  return p;
}

ToyHead ToyHead::zeros(int dim, int class_count) {
  if (class_count != 2 && class_count != 13) {
    throw SizeError("toy head supports 2 or 13 classes, got " +
                    std::to_string(class_count));
  }
  ToyHead h;
  h.dim = dim;
  h.class_count = class_count;
  h.weight.assign(static_cast<std::size_t>(dim) * class_count, 0.0);
  h.bias.assign(static_cast<std::size_t>(class_count), 0.0);
  return h;
}

ToyHead ToyHead::random(int dim, int class_count, std::uint64_t seed) {
  ToyHead h = zeros(dim, class_count);
  h.weight = gaussian_vector(seed, static_cast<std::size_t>(dim) * class_count,
                             1.0 / std::sqrt(static_cast<double>(dim)));
  return h;
}

TokenMatrix patch_embed(const RasterImage& img, const PatchEmbedConfig& cfg) {
  cfg.validate();
  const int ps = cfg.patch_size;
  if ((img.width % ps != 0 || img.height % ps != 0) && cfg.allow_resize) {
    const RasterImage resized = resize_nearest(
        img, nearest_multiple(img.width, ps), nearest_multiple(img.height, ps));
    return embed_grid(
        resized.width, resized.height,
        [&](int x, int y, int c) -> double { return resized.at(x, y, c); },
        cfg, TokenTag::kRgb);
  }
  return embed_grid(
      img.width, img.height,
      [&](int x, int y, int c) -> double { return img.at(x, y, c); }, cfg,
      TokenTag::kRgb);
}

TokenMatrix patch_embed(const DescriptorImage& desc,
                        const PatchEmbedConfig& cfg) {
  // Descriptor planes are already aligned to the source image; resizing
  // them would break plane semantics, so only exact multiples are
  // accepted here and callers resize the RGB input instead.
  auto plane_at = [&](int x, int y, int c) -> double {
    const std::size_t i = static_cast<std::size_t>(y) * desc.width + x;
    switch (c) {
      case 0: return desc.lbp[i];
      case 1: return desc.gray[i];
      default: return desc.hog[i];
    }
  };
  return embed_grid(desc.width, desc.height, plane_at, cfg, TokenTag::kSav);
}

TokenMatrix embed_prompt(const std::string& text,
                         const PatchEmbedConfig& cfg) {
  cfg.validate();
  const std::vector<std::string> words = tokenize(text);
  if (words.empty()) {
    throw DegenerateInputError("prompt has no tokens after normalization");
  }
  TokenMatrix out(static_cast<int>(words.size()), cfg.dim);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::vector<double> v =
        gaussian_vector(fnv1a64(words[i]), static_cast<std::size_t>(cfg.dim),
                        1.0);
    std::copy(v.begin(), v.end(), out.row(static_cast<int>(i)).begin());
  }
  out.set_uniform_tag(TokenTag::kPrompt);
  return out;
}

TokenMatrix project(const TokenMatrix& tokens, const Projector& proj) {
  if (tokens.dim() != proj.d_in) {
    throw DimMismatchError("project: token dim " +
                           std::to_string(tokens.dim()) +
                           " does not match projector input " +
                           std::to_string(proj.d_in));
  }
  TokenMatrix out(tokens.n_tokens(), proj.d_out);
  for (int i = 0; i < tokens.n_tokens(); ++i) {
    const auto in_row = tokens.row(i);
    auto out_row = out.row(i);
    for (int j = 0; j < proj.d_out; ++j) {
      double acc = proj.bias[j];
      for (int k = 0; k < proj.d_in; ++k) {
        acc += in_row[k] * proj.weight[static_cast<std::size_t>(k) * proj.d_out + j];
      }
      out_row[j] = acc;
    }
  }
  out.set_tags(tokens.tags());
  return out;
}

std::vector<double> classify(const TokenMatrix& v_align, const ToyHead& head) {
  if (v_align.dim() != head.dim) {
    throw DimMismatchError("classify: token dim " +
                           std::to_string(v_align.dim()) +
                           " does not match head dim " +
                           std::to_string(head.dim));
  }
  const std::vector<double> pooled = mean_pool(v_align);
  std::vector<double> logits(static_cast<std::size_t>(head.class_count));
  for (int c = 0; c < head.class_count; ++c) {
    double acc = head.bias[c];
    for (int j = 0; j < head.dim; ++j) {
      acc += pooled[j] * head.weight[static_cast<std::size_t>(j) * head.class_count + c];
    }
    logits[c] = acc;
  }
  return softmax(std::move(logits));
}

TrainGradients compute_gradients(const std::vector<TrainSample>& batch,
                                 const Projector& proj, const ToyHead& head) {
  if (batch.empty()) throw DegenerateInputError("empty training batch");
  if (proj.d_out != head.dim) {
    throw DimMismatchError("projector output does not match head input");
  }
  TrainGradients g;
  g.d_proj_weight.assign(proj.weight.size(), 0.0);
  g.d_proj_bias.assign(proj.bias.size(), 0.0);
  g.d_head_weight.assign(head.weight.size(), 0.0);
  g.d_head_bias.assign(head.bias.size(), 0.0);

  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  for (const TrainSample& sample : batch) {
    if (sample.label < 0 || sample.label >= head.class_count) {
      throw BoundsError("label " + std::to_string(sample.label) +
                        " out of range for " +
                        std::to_string(head.class_count) + " classes");
    }
    if (sample.tokens.dim() != proj.d_in) {
      throw DimMismatchError("sample token dim does not match projector");
    }

    // pool(X W1 + b1) == pool(X) W1 + b1, so the forward pass only needs
    // the mean token.
    const std::vector<double> x_bar = mean_pool(sample.tokens);
    std::vector<double> pooled(static_cast<std::size_t>(proj.d_out));
    for (int j = 0; j < proj.d_out; ++j) {
      double acc = proj.bias[j];
      for (int k = 0; k < proj.d_in; ++k) {
        acc += x_bar[k] * proj.weight[static_cast<std::size_t>(k) * proj.d_out + j];
      }
      pooled[j] = acc;
    }
    std::vector<double> logits(static_cast<std::size_t>(head.class_count));
    for (int c = 0; c < head.class_count; ++c) {
      double acc = head.bias[c];
      for (int j = 0; j < head.dim; ++j) {
        acc += pooled[j] * head.weight[static_cast<std::size_t>(j) * head.class_count + c];
      }
      logits[c] = acc;
    }
    const std::vector<double> probs = softmax(logits);
    g.loss += -std::log(std::max(probs[sample.label], 1e-300)) * inv_batch;

    // d loss / d logits = (softmax - onehot) / batch
    std::vector<double> d_logits(probs);
    d_logits[sample.label] -= 1.0;
    for (double& v : d_logits) v *= inv_batch;

    std::vector<double> d_pooled(static_cast<std::size_t>(head.dim), 0.0);
    for (int j = 0; j < head.dim; ++j) {
      for (int c = 0; c < head.class_count; ++c) {
        g.d_head_weight[static_cast<std::size_t>(j) * head.class_count + c] +=
            pooled[j] * d_logits[c];
        d_pooled[j] +=
            head.weight[static_cast<std::size_t>(j) * head.class_count + c] *
            d_logits[c];
      }
    }
    for (int c = 0; c < head.class_count; ++c) g.d_head_bias[c] += d_logits[c];

    for (int k = 0; k < proj.d_in; ++k) {
      for (int j = 0; j < proj.d_out; ++j) {
        g.d_proj_weight[static_cast<std::size_t>(k) * proj.d_out + j] +=
            x_bar[k] * d_pooled[j];
      }
    }
    for (int j = 0; j < proj.d_out; ++j) g.d_proj_bias[j] += d_pooled[j];
  }
  return g;
}

double train_step(const std::vector<TrainSample>& batch, Projector& proj,
                  ToyHead& head, double lr) {
  if (lr < 0.0) throw DegenerateInputError("learning rate must be >= 0");
  const TrainGradients g = compute_gradients(batch, proj, head);
  if (lr == 0.0) return g.loss;
  for (std::size_t i = 0; i < proj.weight.size(); ++i) {
    proj.weight[i] -= lr * g.d_proj_weight[i];
  }
  for (std::size_t i = 0; i < proj.bias.size(); ++i) {
    proj.bias[i] -= lr * g.d_proj_bias[i];
  }
  for (std::size_t i = 0; i < head.weight.size(); ++i) {
    head.weight[i] -= lr * g.d_head_weight[i];
  }
  for (std::size_t i = 0; i < head.bias.size(); ++i) {
    head.bias[i] -= lr * g.d_head_bias[i];
  }
  return g.loss;
}

PipelineResult run_pipeline(const RasterImage& img, const std::string& prompt,
                            const PipelineConfig& cfg, const Projector& proj,
                            const ToyHead& head) {
  PatchEmbedConfig rgb_cfg = cfg.embed;
  RasterImage input = img;
  if (cfg.embed.allow_resize && (img.width % cfg.embed.patch_size != 0 ||
                                 img.height % cfg.embed.patch_size != 0)) {
    input = resize_nearest(img,
                           nearest_multiple(img.width, cfg.embed.patch_size),
                           nearest_multiple(img.height, cfg.embed.patch_size));
  }

  const DescriptorImage savp = compose_savp(input, cfg.hog);
  const TokenMatrix rgb_tokens = patch_embed(input, rgb_cfg);
  PatchEmbedConfig sav_cfg = cfg.embed;
  sav_cfg.seed = mix_seed(cfg.embed.seed, 0x5341564Bu);  // distinct stream
  const TokenMatrix sav_tokens = patch_embed(savp, sav_cfg);

  const TokenMatrix vision = concat_vision(rgb_tokens, sav_tokens);
  const PooledPrompt pooled = pool_prompt(embed_prompt(prompt, cfg.embed));

  PipelineResult result;
  result.plan = plan_mask(vision, pooled, cfg.mask);
  const TokenMatrix surviving = apply_mask(vision, result.plan,
                                           cfg.mask_style);
  const TokenMatrix v_align = project(surviving, proj);
  result.probabilities = classify(v_align, head);

  result.rgb_tokens = rgb_tokens.n_tokens();
  result.sav_tokens = sav_tokens.n_tokens();
  result.grid_w = input.width / cfg.embed.patch_size;
  result.grid_h = input.height / cfg.embed.patch_size;
  result.pre_mask_tokens = vision.n_tokens();
  result.post_mask_tokens = surviving.n_tokens();
  result.v_align_tokens = v_align.n_tokens();
  result.v_align_dim = v_align.dim();
  return result;
}

void save_model(const std::string& path_stem, const Projector& proj,
                const ToyHead& head) {
  save_tokmat(path_stem + ".proj.w.tokmat",
              TokenMatrix(proj.d_in, proj.d_out, proj.weight));
  save_tokmat(path_stem + ".proj.b.tokmat",
              TokenMatrix(1, proj.d_out, proj.bias));
  save_tokmat(path_stem + ".head.w.tokmat",
              TokenMatrix(head.dim, head.class_count, head.weight));
  save_tokmat(path_stem + ".head.b.tokmat",
              TokenMatrix(1, head.class_count, head.bias));

  nlohmann::ordered_json manifest;
  manifest["projector"] = {{"d_in", proj.d_in},
                           {"d_out", proj.d_out},
                           {"weight", path_stem + ".proj.w.tokmat"},
                           {"bias", path_stem + ".proj.b.tokmat"}};
  manifest["head"] = {{"dim", head.dim},
                      {"class_count", head.class_count},
                      {"weight", path_stem + ".head.w.tokmat"},
                      {"bias", path_stem + ".head.b.tokmat"}};
  std::ofstream out(path_stem + ".manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot write " + path_stem + ".manifest.json");
  out << manifest.dump(2) << "\n";
}

void load_model(const std::string& path_stem, Projector* proj,
                ToyHead* head) {
  std::ifstream in(path_stem + ".manifest.json");
  if (!in) throw IoError("cannot read " + path_stem + ".manifest.json");
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model manifest: ") + e.what());
  }

  const TokenMatrix pw =
      load_tokmat(manifest.at("projector").at("weight").get<std::string>());
  const TokenMatrix pb =
      load_tokmat(manifest.at("projector").at("bias").get<std::string>());
  proj->d_in = pw.n_tokens();
  proj->d_out = pw.dim();
  proj->weight = pw.values();
  proj->bias = pb.values();

  const TokenMatrix hw =
      load_tokmat(manifest.at("head").at("weight").get<std::string>());
  const TokenMatrix hb =
      load_tokmat(manifest.at("head").at("bias").get<std::string>());
  head->dim = hw.n_tokens();
  head->class_count = hw.dim();
  head->weight = hw.values();
  head->bias = hb.values();
}

std::vector<SyntheticSample> make_synthetic_faces(int count, int width,
                                                  int height,
                                                  std::uint64_t seed) {
  std::vector<SyntheticSample> samples;
  samples.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    SyntheticSample s;
    s.label = i % 2;
    const int base = s.label == 0 ? 60 : 180;
    s.image = RasterImage(width, height);
    for (std::uint8_t& b : s.image.pixels) {
      const int noise = static_cast<int>(rng.next_below(81)) - 40;
      b = static_cast<std::uint8_t>(std::clamp(base + noise, 0, 255));
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace fsk
