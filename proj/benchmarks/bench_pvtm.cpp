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
#include <benchmark/benchmark.h>

#include "fsk/pvtm.hpp"
#include "fsk/rng.hpp"
#include "fsk/tokens.hpp"

namespace {

fsk::TokenMatrix random_tokens(int n, int d, std::uint64_t seed) {
  fsk::SplitMix64 rng(seed);
  std::vector<double> values(static_cast<std::size_t>(n) * d);
  for (double& v : values) v = rng.next_gaussian();
  return fsk::TokenMatrix(n, d, std::move(values));
}

fsk::PooledPrompt prompt(int d) {
  fsk::SplitMix64 rng(99);
  fsk::PooledPrompt p;
  p.dim = d;
  p.values.resize(static_cast<std::size_t>(d));
  for (double& v : p.values) v = rng.next_gaussian();
  p.nonzero = true;
  return p;
}

void BM_Importance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto vision = random_tokens(n, 64, 7);
  const auto pooled = prompt(64);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fsk::importance(vision, pooled));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Importance)->Range(256, 4096);

void BM_PlanMask(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto vision = random_tokens(n, 64, 8);
  const auto pooled = prompt(64);
  fsk::MaskConfig cfg;
  cfg.seed = 13;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fsk::plan_mask(vision, pooled, cfg));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_PlanMask)->Range(256, 4096);

void BM_ApplyMaskDrop(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto vision = random_tokens(n, 64, 9);
  const auto pooled = prompt(64);
  fsk::MaskConfig cfg;
  cfg.mask_probability = 0.5;
  cfg.seed = 14;
  const auto plan = fsk::plan_mask(vision, pooled, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fsk::apply_mask(vision, plan, fsk::MaskStyle::kDrop));
  }
}
BENCHMARK(BM_ApplyMaskDrop)->Range(256, 4096);

}  // namespace
