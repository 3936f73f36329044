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
#include <cstdio>
#include <iostream>
#include <vector>

#include "commands.hpp"
#include "fsk/error.hpp"
#include "fsk/pvtm.hpp"
#include "fsk/rng.hpp"
#include "fsk/savp.hpp"
#include "fsk/toyenc.hpp"

namespace fsk::cli {

namespace {

struct SweepOptions {
  std::vector<double> k_list;
  std::vector<double> p_list;
  int trials = 1;
  std::string out_csv;
  std::string mode = "fixed_count";
  int samples = 24;
  int image_size = 32;
  int patch_size = 8;
  int dim = 16;
  int d_out = 8;
  int train_steps = 30;
  double lr = 0.1;
  std::string prompt = "Is this face real or a spoof attack?";
};

// Pre-mask token matrices for one trial: SAVP + rgb/sav embeddings per
// synthetic sample. Shared across all (k, p) cells of the trial.
std::vector<std::pair<TokenMatrix, int>> trial_tokens(
    const SweepOptions& opt, std::uint64_t trial_seed) {
  PatchEmbedConfig rgb_cfg;
  rgb_cfg.patch_size = opt.patch_size;
  rgb_cfg.dim = opt.dim;
  rgb_cfg.seed = trial_seed;
  PatchEmbedConfig sav_cfg = rgb_cfg;
  sav_cfg.seed = mix_seed(trial_seed, 0x5341564Bu);

  std::vector<std::pair<TokenMatrix, int>> out;
  const auto faces = make_synthetic_faces(opt.samples, opt.image_size,
                                          opt.image_size, trial_seed);
  for (const auto& face : faces) {
    const DescriptorImage savp = compose_savp(face.image, HogConfig{});
    const TokenMatrix vision = concat_vision(patch_embed(face.image, rgb_cfg),
                                             patch_embed(savp, sav_cfg));
    out.emplace_back(vision, face.label);
  }
  return out;
}

void run_sweep(const SweepOptions& opt, std::uint64_t seed) {
  for (double k : opt.k_list) {
    if (!(k >= 0.0 && k <= 1.0)) {
      throw DegenerateInputError("k grid value out of [0,1]");
    }
  }
  for (double p : opt.p_list) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DegenerateInputError("p grid value out of [0,1]");
    }
  }
  if (opt.k_list.empty() || opt.p_list.empty() || opt.trials < 1) {
    throw DegenerateInputError("sweep needs non-empty grids and trials >= 1");
  }

  PatchEmbedConfig prompt_cfg;
  prompt_cfg.dim = opt.dim;
  const PooledPrompt pooled = pool_prompt(embed_prompt(opt.prompt, prompt_cfg));

  std::string csv = "k,p,trial,post_mask_n,toy_accuracy\n";
  for (int trial = 0; trial < opt.trials; ++trial) {
    const std::uint64_t trial_seed =
        mix_seed(seed, static_cast<std::uint64_t>(trial));
    const auto tokens = trial_tokens(opt, trial_seed);

    for (std::size_t ki = 0; ki < opt.k_list.size(); ++ki) {
      for (std::size_t pi = 0; pi < opt.p_list.size(); ++pi) {
        MaskConfig mask_cfg;
        mask_cfg.retain_fraction = opt.k_list[ki];
        mask_cfg.mask_probability = opt.p_list[pi];
        mask_cfg.mode = opt.mode == "bernoulli" ? MaskMode::kBernoulli
                                                : MaskMode::kFixedCount;

        std::vector<TrainSample> batch;
        int post_mask_n = 0;
        for (std::size_t s = 0; s < tokens.size(); ++s) {
          mask_cfg.seed = mix_seed(trial_seed, (ki << 24) ^ (pi << 16) ^ s);
          const MaskPlan plan = plan_mask(tokens[s].first, pooled, mask_cfg);
          const TokenMatrix surviving =
              apply_mask(tokens[s].first, plan, MaskStyle::kDrop);
          if (s == 0) post_mask_n = surviving.n_tokens();
          batch.push_back({surviving, tokens[s].second});
        }

        Projector proj =
            Projector::random(opt.dim, opt.d_out, mix_seed(trial_seed, 1));
        ToyHead head =
            ToyHead::random(opt.d_out, 2, mix_seed(trial_seed, 2));
        for (int step = 0; step < opt.train_steps; ++step) {
          train_step(batch, proj, head, opt.lr);
        }

        int correct = 0;
        for (const auto& sample : batch) {
          const auto probs = classify(project(sample.tokens, proj), head);
          if ((probs[1] > probs[0] ? 1 : 0) == sample.label) ++correct;
        }
        const double acc =
            100.0 * static_cast<double>(correct) / batch.size();

        char row[128];
        std::snprintf(row, sizeof row, "%g,%g,%d,%d,%.4f\n", opt.k_list[ki],
                      opt.p_list[pi], trial, post_mask_n, acc);
        csv += row;
      }
    }
  }

  write_text_atomic(opt.out_csv, csv);
  std::cout << "wrote " << opt.k_list.size() * opt.p_list.size() * opt.trials
            << " rows to " << opt.out_csv << "\n";
}

}  // namespace

void register_sweep(CLI::App& app, GlobalConfig& cfg) {
  auto opt = std::make_shared<SweepOptions>();
  CLI::App* cmd = app.add_subcommand(
      "sweep", "factorial (k, p) ablation over the toy pipeline; emits CSV "
               "columns k,p,trial,post_mask_n,toy_accuracy");
  cmd->add_option("--k-list", opt->k_list, "retain fractions to sweep")
      ->required()
      ->delimiter(',');
  cmd->add_option("--p-list", opt->p_list, "mask probabilities to sweep")
      ->required()
      ->delimiter(',');
  cmd->add_option("--trials", opt->trials, "trials per cell")->default_val(1);
  cmd->add_option("--out", opt->out_csv, "CSV output path")->required();
  cmd->add_option("--mode", opt->mode, "bernoulli | fixed_count")
      ->default_val("fixed_count")
      ->check(CLI::IsMember({"bernoulli", "fixed_count"}));
  cmd->add_option("--samples", opt->samples, "synthetic set size")
      ->default_val(24);
  cmd->add_option("--image-size", opt->image_size, "synthetic image side")
      ->default_val(32);
  cmd->add_option("--patch-size", opt->patch_size, "embedding patch size")
      ->default_val(8);
  cmd->add_option("--dim", opt->dim, "embedding dim")->default_val(16);
  cmd->add_option("--train-steps", opt->train_steps,
                  "gradient steps per cell")
      ->default_val(30);
  cmd->add_option("--lr", opt->lr, "learning rate")->default_val(0.1);
  cmd->add_option("--prompt", opt->prompt, "guidance prompt");

  cmd->callback([opt, &cfg] {
    if (cfg.verbose) cfg.print_effective(std::cerr);
    run_sweep(*opt, cfg.seed());
  });
}

}  // namespace fsk::cli
