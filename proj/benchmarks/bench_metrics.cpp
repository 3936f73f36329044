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

#include "fsk/metrics.hpp"
#include "fsk/rng.hpp"

namespace {

fsk::TextPair random_pair(int len, std::uint64_t seed) {
  static const std::vector<std::string> kVocab = {
      "the", "face", "shows", "even", "texture", "with", "soft",
      "shadows", "and", "steady", "color", "response"};
  fsk::SplitMix64 rng(seed);
  fsk::TextPair pair;
  for (int i = 0; i < len; ++i) {
    pair.hypothesis.push_back(kVocab[rng.next_below(kVocab.size())]);
    pair.reference.push_back(kVocab[rng.next_below(kVocab.size())]);
  }
  return pair;
}

void BM_Bleu4(benchmark::State& state) {
  const auto pair = random_pair(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fsk::bleu_n(pair, 4));
  }
}
BENCHMARK(BM_Bleu4)->Arg(16)->Arg(64)->Arg(256);

void BM_RougeL(benchmark::State& state) {
  const auto pair = random_pair(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fsk::rouge_l(pair));
  }
}
BENCHMARK(BM_RougeL)->Arg(16)->Arg(64)->Arg(256);

void BM_MeteorExact(benchmark::State& state) {
  const auto pair = random_pair(static_cast<int>(state.range(0)), 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fsk::meteor_exact(pair));
  }
}
BENCHMARK(BM_MeteorExact)->Arg(8)->Arg(16)->Arg(32);

}  // namespace
