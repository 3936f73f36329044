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
#include <iostream>

#include "commands.hpp"
#include "fsk/error.hpp"
#include "fsk/image.hpp"
#include "fsk/pvtm.hpp"
#include "fsk/toyenc.hpp"

namespace fsk::cli {

namespace {

struct PvtmOptions {
  std::string tokens_path;
  std::string prompt;
  std::string out_path;
  double retain_fraction = 0.10;
  double mask_probability = 0.05;
  std::string mode = "bernoulli";
  std::string map_spec;  // "WxH"
  std::string map_out;
};

std::pair<int, int> parse_grid_spec(const std::string& spec) {
  const std::size_t x = spec.find('x');
  if (x == std::string::npos || x == 0 || x + 1 >= spec.size()) {
    throw DegenerateInputError("--importance-map expects WxH, got " + spec);
  }
  return {std::stoi(spec.substr(0, x)), std::stoi(spec.substr(x + 1))};
}

}  // namespace

void register_pvtm(CLI::App& app, GlobalConfig& cfg) {
  auto opt = std::make_shared<PvtmOptions>();
  CLI::App* cmd = app.add_subcommand(
      "pvtm",
      "rank tokens against a prompt, retain the top k share, mask the rest");
  cmd->add_option("--tokens", opt->tokens_path, "TOKMAT token matrix file")
      ->required();
  cmd->add_option("--prompt", opt->prompt, "guidance prompt text")->required();
  cmd->add_option("--out", opt->out_path, "mask plan JSON output")->required();
  cmd->add_option("--k", opt->retain_fraction, "retain fraction in [0,1]")
      ->default_val(0.10);
  cmd->add_option("--p", opt->mask_probability, "mask probability in [0,1]")
      ->default_val(0.05);
  cmd->add_option("--mode", opt->mode, "bernoulli | fixed_count")
      ->default_val("bernoulli")
      ->check(CLI::IsMember({"bernoulli", "fixed_count"}));
  cmd->add_option("--importance-map", opt->map_spec,
                  "render the importance grid as WxH (requires W*H = N)");
  cmd->add_option("--map-out", opt->map_out,
                  "importance map PGM path (default <out>.pgm)");

  cmd->callback([opt, &cfg] {
    if (cfg.verbose) cfg.print_effective(std::cerr);

    const TokenMatrix tokens = load_tokmat(opt->tokens_path);

    PatchEmbedConfig prompt_cfg;
    prompt_cfg.dim = tokens.dim();
    const PooledPrompt pooled =
        pool_prompt(embed_prompt(opt->prompt, prompt_cfg));

    MaskConfig mask_cfg;
    mask_cfg.retain_fraction = opt->retain_fraction;
    mask_cfg.mask_probability = opt->mask_probability;
    mask_cfg.mode = opt->mode == "bernoulli" ? MaskMode::kBernoulli
                                             : MaskMode::kFixedCount;
    mask_cfg.seed = cfg.seed();

    const MaskPlan plan = plan_mask(tokens, pooled, mask_cfg);
    write_text_atomic(opt->out_path, mask_plan_to_json(plan) + "\n");

    if (!opt->map_spec.empty()) {
      const auto [w, h] = parse_grid_spec(opt->map_spec);
      const GrayImage map = importance_map(plan, w, h);
      const std::string map_path =
          opt->map_out.empty() ? opt->out_path + ".pgm" : opt->map_out;
      save_pgm(map_path, map);
    }

    std::cout << "tokens " << tokens.n_tokens() << " retained "
              << plan.retained.size() << " masked " << plan.masked.size()
              << " kept " << plan.kept.size() << "\n";
  });
}

}  // namespace fsk::cli
