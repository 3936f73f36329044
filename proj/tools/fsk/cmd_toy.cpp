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
#include <filesystem>
#include <iostream>
#include <span>

#include <json.hpp>

#include "commands.hpp"
#include "fsk/error.hpp"
#include "fsk/image.hpp"
#include "fsk/pvtm.hpp"
#include "fsk/rng.hpp"
#include "fsk/toyenc.hpp"

namespace fsk::cli {

namespace {

struct ToyOptions {
  std::string image_path;
  std::string prompt = "Is this face real or a spoof attack?";
  double retain_fraction = 0.10;
  double mask_probability = 0.05;
  std::string mode = "bernoulli";
  std::string style = "drop";
  int patch_size = 16;
  int dim = 64;
  int d_out = 32;
  int classes = 2;
  bool allow_resize = false;
  std::string plan_out;
  std::string map_dir;
};

void run_toy(const ToyOptions& opt, std::uint64_t seed) {
  const RasterImage img = load_ppm(opt.image_path);

  PipelineConfig cfg;
  cfg.embed.patch_size = opt.patch_size;
  cfg.embed.dim = opt.dim;
  cfg.embed.seed = seed;
  cfg.embed.allow_resize = opt.allow_resize;
  cfg.mask.retain_fraction = opt.retain_fraction;
  cfg.mask.mask_probability = opt.mask_probability;
  cfg.mask.mode = opt.mode == "bernoulli" ? MaskMode::kBernoulli
                                          : MaskMode::kFixedCount;
  cfg.mask.seed = mix_seed(seed, 0x4D41534Bu);
  cfg.mask_style = opt.style == "drop" ? MaskStyle::kDrop : MaskStyle::kZero;

  const Projector proj =
      Projector::random(opt.dim, opt.d_out, mix_seed(seed, 1));
  const ToyHead head =
      ToyHead::random(opt.d_out, opt.classes, mix_seed(seed, 2));

  const PipelineResult result = run_pipeline(img, opt.prompt, cfg, proj, head);

  nlohmann::ordered_json j;
  j["probabilities"] = result.probabilities;
  j["shapes"] = {{"rgb_tokens", result.rgb_tokens},
                 {"sav_tokens", result.sav_tokens},
                 {"pre_mask_tokens", result.pre_mask_tokens},
                 {"post_mask_tokens", result.post_mask_tokens},
                 {"v_align_tokens", result.v_align_tokens},
                 {"v_align_dim", result.v_align_dim}};
  j["plan"] = {{"retained", result.plan.retained.size()},
               {"masked", result.plan.masked.size()},
               {"kept", result.plan.kept.size()}};
  j["seed"] = seed;
  std::cout << j.dump() << "\n";

  if (!opt.plan_out.empty()) {
    write_text_atomic(opt.plan_out, mask_plan_to_json(result.plan) + "\n");
  }

  if (!opt.map_dir.empty()) {
    // Separate rgb / sav importance grids, one cell per patch, normalized
    // within each token family.
    std::filesystem::create_directories(opt.map_dir);
    const std::span<const double> all(result.plan.importance);
    const auto rgb_slice = all.subspan(0, result.rgb_tokens);
    const auto sav_slice = all.subspan(result.rgb_tokens, result.sav_tokens);
    save_pgm((std::filesystem::path(opt.map_dir) / "rgb.pgm").string(),
             importance_map(rgb_slice, result.grid_w, result.grid_h));
    save_pgm((std::filesystem::path(opt.map_dir) / "sav.pgm").string(),
             importance_map(sav_slice, result.grid_w, result.grid_h));
  }
}

}  // namespace

void register_toy(CLI::App& app, GlobalConfig& cfg) {
  auto opt = std::make_shared<ToyOptions>();
  CLI::App* cmd =
      app.add_subcommand("toy", "toy-scale encoder/projector pipeline");
  cmd->require_subcommand(1);

  CLI::App* run = cmd->add_subcommand(
      "run", "run savp -> embed -> mask -> project -> classify on one image");
  run->add_option("--image", opt->image_path, "input PPM image")->required();
  run->add_option("--prompt", opt->prompt, "guidance prompt");
  run->add_option("--k", opt->retain_fraction, "retain fraction")
      ->default_val(0.10);
  run->add_option("--p", opt->mask_probability, "mask probability")
      ->default_val(0.05);
  run->add_option("--mode", opt->mode, "bernoulli | fixed_count")
      ->default_val("bernoulli")
      ->check(CLI::IsMember({"bernoulli", "fixed_count"}));
  run->add_option("--style", opt->style, "drop | zero")
      ->default_val("drop")
      ->check(CLI::IsMember({"drop", "zero"}));
  run->add_option("--patch-size", opt->patch_size, "patch size")
      ->default_val(16);
  run->add_option("--dim", opt->dim, "embedding dim")->default_val(64);
  run->add_option("--d-out", opt->d_out, "projector output dim")
      ->default_val(32);
  run->add_option("--classes", opt->classes, "decision classes (2 or 13)")
      ->default_val(2);
  run->add_flag("--allow-resize", opt->allow_resize,
                "nearest-neighbor resize to a patch multiple");
  run->add_option("--plan-out", opt->plan_out, "write the full MaskPlan JSON");
  run->add_option("--importance-map-dir", opt->map_dir,
                  "write rgb.pgm / sav.pgm importance grids here");

  run->callback([opt, &cfg] {
    if (cfg.verbose) cfg.print_effective(std::cerr);
    run_toy(*opt, cfg.seed());
  });
}

}  // namespace fsk::cli
