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
#include "fsk/pvtm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "fsk/error.hpp"
#include "fsk/rng.hpp"

namespace fsk {

namespace {

// ceil(k*N) robust to the binary representation of k (0.10 * 100 must be
// 10, not 11).
int retained_count(double k, int n) {
  const int c = static_cast<int>(std::ceil(k * n - 1e-9));
  return std::clamp(c, 0, n);
}

// round-half-up(p*r) with the same representation guard.
int masked_count(double p, int r) {
  const int c = static_cast<int>(std::floor(p * r + 0.5 + 1e-9));
  return std::clamp(c, 0, r);
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::string mode_name(MaskMode mode) {
  return mode == MaskMode::kBernoulli ? "bernoulli" : "fixed_count";
}

MaskMode mode_from_name(const std::string& name) {
  if (name == "bernoulli") return MaskMode::kBernoulli;
  if (name == "fixed_count") return MaskMode::kFixedCount;
  throw ParseError("unknown mask mode \"" + name + "\"");
}

}  // namespace

void MaskConfig::validate() const {
  if (!(retain_fraction >= 0.0 && retain_fraction <= 1.0)) {
    throw DegenerateInputError("retain_fraction must be in [0, 1]");
  }
  if (!(mask_probability >= 0.0 && mask_probability <= 1.0)) {
    throw DegenerateInputError("mask_probability must be in [0, 1]");
  }
}

TokenMatrix concat_vision(const TokenMatrix& rgb, const TokenMatrix& sav) {
  if (rgb.dim() != sav.dim()) {
    throw DimMismatchError("concat_vision: dim mismatch, " +
                           std::to_string(rgb.dim()) + " vs " +
                           std::to_string(sav.dim()));
  }
  std::vector<double> values;
  values.reserve(rgb.values().size() + sav.values().size());
  values.insert(values.end(), rgb.values().begin(), rgb.values().end());
  values.insert(values.end(), sav.values().begin(), sav.values().end());
  TokenMatrix out(rgb.n_tokens() + sav.n_tokens(), rgb.dim(),
                  std::move(values));

  std::vector<TokenTag> tags;
  tags.reserve(static_cast<std::size_t>(out.n_tokens()));
  for (int i = 0; i < rgb.n_tokens(); ++i) {
    tags.push_back(rgb.tags().empty() ? TokenTag::kRgb : rgb.tags()[i]);
  }
  for (int i = 0; i < sav.n_tokens(); ++i) {
    tags.push_back(sav.tags().empty() ? TokenTag::kSav : sav.tags()[i]);
  }
  out.set_tags(std::move(tags));
  return out;
}

PooledPrompt pool_prompt(const TokenMatrix& prompt_tokens) {
  PooledPrompt pooled;
  pooled.dim = prompt_tokens.dim();
  pooled.values.assign(static_cast<std::size_t>(pooled.dim), 0.0);
  for (int i = 0; i < prompt_tokens.n_tokens(); ++i) {
    const auto r = prompt_tokens.row(i);
    for (int j = 0; j < pooled.dim; ++j) pooled.values[j] += r[j];
  }
  for (double& v : pooled.values) v /= prompt_tokens.n_tokens();
  pooled.nonzero = l2_norm(pooled.values) > 0.0;
  return pooled;
}

double cosine_similarity(std::span<const double> v,
                         std::span<const double> p) {
  if (v.size() != p.size()) {
    throw DimMismatchError("cosine_similarity: dim mismatch, " +
                           std::to_string(v.size()) + " vs " +
                           std::to_string(p.size()));
  }
  const double nv = l2_norm(v);
  const double np = l2_norm(p);
  if (nv == 0.0 || np == 0.0) {
    throw DegenerateInputError(
        "cosine_similarity: zero-norm vector has no direction");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * p[i];
  return dot / (nv * np);
}

std::vector<double> importance(const TokenMatrix& vision,
                               const PooledPrompt& prompt) {
  if (prompt.dim != vision.dim()) {
    throw DimMismatchError("importance: prompt dim " +
                           std::to_string(prompt.dim) +
                           " does not match token dim " +
                           std::to_string(vision.dim()));
  }
  if (!prompt.nonzero) {
    throw DegenerateInputError(
        "importance: pooled prompt is zero, no direction to score against");
  }

  const int n = vision.n_tokens();
  std::vector<double> sims(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto row = vision.row(i);
    // Zero-norm tokens carry no direction; score them at the similarity
    // floor instead of dividing by zero.
    sims[i] = l2_norm(row) == 0.0 ? -1.0
                                  : cosine_similarity(row, prompt.values);
  }

  const double max_sim = *std::max_element(sims.begin(), sims.end());
  double denom = 0.0;
  for (double& s : sims) {
    s = std::exp(s - max_sim);
    denom += s;
  }
  for (double& s : sims) s /= denom;
  return sims;
}

MaskPlan plan_mask(const TokenMatrix& vision, const PooledPrompt& prompt,
                   const MaskConfig& cfg) {
  cfg.validate();
  MaskPlan plan;
  plan.config = cfg;
  plan.seed = cfg.seed;
  plan.importance = importance(vision, prompt);

  const int n = vision.n_tokens();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (plan.importance[a] != plan.importance[b]) {
      return plan.importance[a] > plan.importance[b];
    }
    return a < b;  // ties: lower index wins the protected slot
  });

  const int n_retained = retained_count(cfg.retain_fraction, n);
  plan.retained.assign(order.begin(), order.begin() + n_retained);
  std::sort(plan.retained.begin(), plan.retained.end());

  std::vector<int> remaining(order.begin() + n_retained, order.end());
  std::sort(remaining.begin(), remaining.end());

  SplitMix64 rng(cfg.seed);
  std::vector<bool> is_masked(static_cast<std::size_t>(n), false);
  if (cfg.mode == MaskMode::kBernoulli) {
    for (int idx : remaining) {
      if (rng.next_double() < cfg.mask_probability) is_masked[idx] = true;
    }
  } else {
    const int m = masked_count(cfg.mask_probability,
                               static_cast<int>(remaining.size()));
    std::vector<int> pool = remaining;
    for (int i = 0; i < m; ++i) {
      const std::uint64_t j =
          i + rng.next_below(static_cast<std::uint64_t>(pool.size() - i));
      std::swap(pool[i], pool[j]);
      is_masked[pool[i]] = true;
    }
  }

  for (int idx : remaining) {
    (is_masked[idx] ? plan.masked : plan.kept).push_back(idx);
  }
  return plan;
}

TokenMatrix apply_mask(const TokenMatrix& vision, const MaskPlan& plan,
                       MaskStyle style) {
  const int n = vision.n_tokens();
  for (int idx : plan.masked) {
    if (idx < 0 || idx >= n) {
      throw BoundsError("apply_mask: masked index " + std::to_string(idx) +
                        " out of range for " + std::to_string(n) + " tokens");
    }
  }
  std::vector<bool> is_masked(static_cast<std::size_t>(n), false);
  for (int idx : plan.masked) is_masked[idx] = true;

  if (style == MaskStyle::kZero) {
    TokenMatrix out = vision;
    for (int idx : plan.masked) {
      auto row = out.row(idx);
      std::fill(row.begin(), row.end(), 0.0);
    }
    return out;
  }

  const int n_out = n - static_cast<int>(plan.masked.size());
  if (n_out < 1) {
    throw DegenerateInputError("apply_mask: dropping every token");
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n_out) * vision.dim());
  std::vector<TokenTag> tags;
  for (int i = 0; i < n; ++i) {
    if (is_masked[i]) continue;
    const auto row = vision.row(i);
    values.insert(values.end(), row.begin(), row.end());
    if (!vision.tags().empty()) tags.push_back(vision.tags()[i]);
  }
  TokenMatrix out(n_out, vision.dim(), std::move(values));
  out.set_tags(std::move(tags));
  return out;
}

GrayImage importance_map(std::span<const double> importance, int grid_w,
                         int grid_h) {
  if (grid_w < 1 || grid_h < 1 ||
      static_cast<std::size_t>(grid_w) * grid_h != importance.size()) {
    throw SizeError("importance_map: grid " + std::to_string(grid_w) + "x" +
                    std::to_string(grid_h) + " does not hold " +
                    std::to_string(importance.size()) + " tokens");
  }
  double max_v = 0.0;
  for (double v : importance) max_v = std::max(max_v, v);
  GrayImage img(grid_w, grid_h);
  if (max_v == 0.0) return img;
  for (std::size_t i = 0; i < importance.size(); ++i) {
    const double scaled = 255.0 * importance[i] / max_v;
    img.pixels[i] = static_cast<std::uint8_t>(
        std::clamp(std::floor(scaled + 0.5), 0.0, 255.0));
  }
  return img;
}

GrayImage importance_map(const MaskPlan& plan, int grid_w, int grid_h) {
  return importance_map(std::span<const double>(plan.importance), grid_w,
                        grid_h);
}

std::string mask_plan_to_json(const MaskPlan& plan) {
  nlohmann::ordered_json j;
  j["importance"] = plan.importance;
  j["retained"] = plan.retained;
  j["masked"] = plan.masked;
  j["kept"] = plan.kept;
  j["seed"] = plan.seed;
  j["config"] = {
      {"retain_fraction", plan.config.retain_fraction},
      {"mask_probability", plan.config.mask_probability},
      {"mode", mode_name(plan.config.mode)},
      {"seed", plan.config.seed},
  };
  return j.dump();
}

MaskPlan mask_plan_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("mask plan JSON: ") + e.what());
  }
  MaskPlan plan;
  try {
    plan.importance = j.at("importance").get<std::vector<double>>();
    plan.retained = j.at("retained").get<std::vector<int>>();
    plan.masked = j.at("masked").get<std::vector<int>>();
    plan.kept = j.at("kept").get<std::vector<int>>();
    plan.seed = j.at("seed").get<std::uint64_t>();
    const auto& cfg = j.at("config");
    plan.config.retain_fraction = cfg.at("retain_fraction").get<double>();
    plan.config.mask_probability = cfg.at("mask_probability").get<double>();
    plan.config.mode = mode_from_name(cfg.at("mode").get<std::string>());
    plan.config.seed = cfg.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("mask plan JSON: ") + e.what());
  }
  const std::size_t n = plan.importance.size();
  if (plan.retained.size() + plan.masked.size() + plan.kept.size() != n) {
    throw ParseError("mask plan JSON: index lists do not partition tokens");
  }
  return plan;
}

}  // namespace fsk
