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

#include "fsk/rng.hpp"
#include "fsk/savp.hpp"

namespace {

fsk::RasterImage random_image(int side, std::uint64_t seed) {
  fsk::RasterImage img(side, side);
  fsk::SplitMix64 rng(seed);
  for (auto& b : img.pixels) {
    b = static_cast<std::uint8_t>(rng.next_below(256));
  }
  return img;
}

void BM_ToGray(benchmark::State& state) {
  const auto img = random_image(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fsk::to_gray(img));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) *
                          state.range(0));
}
BENCHMARK(BM_ToGray)->Arg(64)->Arg(128)->Arg(256);

void BM_LbpPlane(benchmark::State& state) {
  const auto gray = fsk::to_gray(random_image(static_cast<int>(state.range(0)), 2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fsk::lbp_plane(gray));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) *
                          state.range(0));
}
BENCHMARK(BM_LbpPlane)->Arg(64)->Arg(128)->Arg(256);

void BM_HogPlane(benchmark::State& state) {
  const auto gray = fsk::to_gray(random_image(static_cast<int>(state.range(0)), 3));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fsk::hog_plane(gray));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) *
                          state.range(0));
}
BENCHMARK(BM_HogPlane)->Arg(64)->Arg(128)->Arg(256);

void BM_ComposeSavp(benchmark::State& state) {
  const auto img = random_image(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fsk::compose_savp(img));
  }
}
BENCHMARK(BM_ComposeSavp)->Arg(128)->Arg(224);

}  // namespace
