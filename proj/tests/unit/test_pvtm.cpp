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
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fsk/error.hpp"
#include "fsk/pvtm.hpp"
#include "fsk/rng.hpp"
#include "fsk/tokens.hpp"
#include "support/fixtures.hpp"

using namespace fsk;

namespace {

TokenMatrix matrix_of(int n, int d, std::vector<double> values) {
  return TokenMatrix(n, d, std::move(values));
}

TokenMatrix random_tokens(int n, int d, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> values(static_cast<std::size_t>(n) * d);
  for (double& v : values) v = rng.next_gaussian();
  return TokenMatrix(n, d, std::move(values));
}

PooledPrompt prompt_of(std::vector<double> values) {
  PooledPrompt p;
  p.dim = static_cast<int>(values.size());
  p.values = std::move(values);
  p.nonzero = true;
  return p;
}

}  // namespace

TEST_SUITE("pvtm") {

TEST_CASE("concat_vision stacks rgb rows above sav rows") {
  const auto rgb = random_tokens(2, 4, 1);
  const auto sav = random_tokens(3, 4, 2);
  const auto joined = concat_vision(rgb, sav);
  CHECK(joined.n_tokens() == 5);
  CHECK(joined.dim() == 4);
  CHECK(joined.tags()[0] == TokenTag::kRgb);
  CHECK(joined.tags()[1] == TokenTag::kRgb);
  CHECK(joined.tags()[2] == TokenTag::kSav);
  // row 3 of the result is row 1 of sav, element-wise
  for (int j = 0; j < 4; ++j) {
    CHECK(joined.at(3, j) == sav.at(1, j));
  }
}

TEST_CASE("concat_vision rejects dimension mismatch and empty operands") {
  CHECK_THROWS_AS(concat_vision(random_tokens(2, 4, 1), random_tokens(2, 5, 2)),
                  DimMismatchError);
  CHECK_THROWS_AS(TokenMatrix(0, 4), SizeError);
}

TEST_CASE("pool_prompt averages per dimension") {
  SUBCASE("single token pools to itself") {
    const auto m = matrix_of(1, 3, {1.5, -2.0, 0.25});
    const auto p = pool_prompt(m);
    CHECK(p.values == std::vector<double>{1.5, -2.0, 0.25});
    CHECK(p.nonzero);
  }
  SUBCASE("two unit tokens") {
    const auto p = pool_prompt(matrix_of(2, 2, {1, 0, 0, 1}));
    CHECK(p.values == std::vector<double>{0.5, 0.5});
  }
  SUBCASE("column means") {
    const auto p = pool_prompt(matrix_of(3, 2, {2, 4, 4, 8, 0, 0}));
    CHECK(p.values == std::vector<double>{2.0, 4.0});
  }
}

TEST_CASE("cosine_similarity") {
  const std::vector<double> a = {3, 4};
  CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<double> ex = {1, 0};
  const std::vector<double> ey = {0, 1};
  CHECK(cosine_similarity(ex, ey) == doctest::Approx(0.0).epsilon(1e-12));
  const std::vector<double> diag = {1, 1};
  CHECK(cosine_similarity(diag, ex) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

  const std::vector<double> zero = {0, 0};
  CHECK_THROWS_AS(cosine_similarity(zero, ex), DegenerateInputError);
  CHECK_THROWS_AS(cosine_similarity(ex, zero), DegenerateInputError);
}

TEST_CASE("importance is the softmax of prompt similarities") {
  SUBCASE("identical tokens score uniformly") {
    const auto vision = matrix_of(4, 2, {1, 2, 1, 2, 1, 2, 1, 2});
    const auto s = importance(vision, prompt_of({0.5, 1.0}));
    for (double v : s) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("similarities one and zero") {
    // (2, 0) has cosine 1 with the prompt, (0, 3) has cosine 0.
    const auto vision = matrix_of(2, 2, {2, 0, 0, 3});
    const auto s = importance(vision, prompt_of({1, 0}));
    const double e = std::exp(1.0);
    CHECK(s[0] == doctest::Approx(e / (e + 1)).epsilon(1e-12));
    CHECK(s[1] == doctest::Approx(1 / (e + 1)).epsilon(1e-12));
  }
  SUBCASE("scaling tokens does not change importance") {
    const auto vision = random_tokens(6, 3, 5);
    TokenMatrix scaled = vision;
    for (int i = 0; i < scaled.n_tokens(); ++i) {
      for (int j = 0; j < scaled.dim(); ++j) scaled.at(i, j) *= 3.0;
    }
    const auto p = prompt_of({0.3, -0.7, 1.1});
    const auto s0 = importance(vision, p);
    const auto s1 = importance(scaled, p);
    for (std::size_t i = 0; i < s0.size(); ++i) {
      CHECK(s0[i] == doctest::Approx(s1[i]).epsilon(1e-12));
    }
  }
  SUBCASE("zero-norm tokens take the similarity floor") {
    const auto vision = matrix_of(2, 2, {1, 0, 0, 0});
    const auto s = importance(vision, prompt_of({1, 0}));
    const double e1 = std::exp(1.0);
    const double em1 = std::exp(-1.0);
    CHECK(s[0] == doctest::Approx(e1 / (e1 + em1)).epsilon(1e-12));
    CHECK(s[1] == doctest::Approx(em1 / (e1 + em1)).epsilon(1e-12));
  }
  SUBCASE("zero pooled prompt is an error") {
    PooledPrompt zero;
    zero.dim = 2;
    zero.values = {0, 0};
    zero.nonzero = false;
    CHECK_THROWS_AS(importance(random_tokens(3, 2, 9), zero),
                    DegenerateInputError);
  }
  SUBCASE("importance sums to one") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto vision = random_tokens(5 + seed % 40, 4, seed);
      const auto p = prompt_of({0.2, 0.4, -0.8, 0.1});
      const auto s = importance(vision, p);
      const double sum = std::accumulate(s.begin(), s.end(), 0.0);
      CHECK(std::abs(sum - 1.0) <= 1e-9);
      for (double v : s) CHECK(v > 0.0);
    }
  }
}

TEST_CASE("plan_mask honors the no-op and protect-all configs") {
  const auto vision = random_tokens(10, 4, 3);
  const auto p = prompt_of({1, 0, 0, 0});

  MaskConfig cfg;
  cfg.retain_fraction = 0.0;
  cfg.mask_probability = 0.0;
  auto plan = plan_mask(vision, p, cfg);
  CHECK(plan.retained.empty());
  CHECK(plan.masked.empty());
  CHECK(plan.kept.size() == 10);

  cfg.retain_fraction = 1.0;
  cfg.mask_probability = 0.9;
  plan = plan_mask(vision, p, cfg);
  CHECK(plan.retained.size() == 10);
  CHECK(plan.masked.empty());
}

TEST_CASE("plan_mask fixed_count partition for N=100, k=.10, p=.05") {
  const auto vision = random_tokens(100, 8, 77);
  const auto p = prompt_of({1, 0, 0, 0, 0.5, 0, 0, -1});
  MaskConfig cfg;
  cfg.retain_fraction = 0.10;
  cfg.mask_probability = 0.05;
  cfg.mode = MaskMode::kFixedCount;
  cfg.seed = 1234;

  const auto plan = plan_mask(vision, p, cfg);
  CHECK(plan.retained.size() == 10);
  CHECK(plan.masked.size() == 5);  // round(0.05 * 90) = 5, half-up
  CHECK(plan.kept.size() == 85);
}

TEST_CASE("plan_mask partitions the index set") {
  const auto vision = random_tokens(37, 4, 11);
  const auto p = prompt_of({0.5, 0.5, -1, 2});
  MaskConfig cfg;
  cfg.retain_fraction = 0.2;
  cfg.mask_probability = 0.3;
  cfg.seed = 9;
  for (MaskMode mode : {MaskMode::kBernoulli, MaskMode::kFixedCount}) {
    cfg.mode = mode;
    const auto plan = plan_mask(vision, p, cfg);
    std::vector<bool> seen(37, false);
    for (const auto* bucket : {&plan.retained, &plan.masked, &plan.kept}) {
      for (int idx : *bucket) {
        CHECK(!seen[idx]);
        seen[idx] = true;
      }
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
    CHECK(plan.retained.size() == 8);  // ceil(0.2 * 37) = 8
  }
}

TEST_CASE("plan_mask is deterministic and scale invariant") {
  const auto vision = random_tokens(50, 4, 123);
  const auto p = prompt_of({0.4, -0.2, 0.9, 0.3});
  MaskConfig cfg;
  cfg.retain_fraction = 0.1;
  cfg.mask_probability = 0.25;
  cfg.seed = 777;

  const auto plan_a = plan_mask(vision, p, cfg);
  const auto plan_b = plan_mask(vision, p, cfg);
  CHECK(plan_a.retained == plan_b.retained);
  CHECK(plan_a.masked == plan_b.masked);
  CHECK(plan_a.kept == plan_b.kept);

  TokenMatrix scaled = vision;
  for (int i = 0; i < scaled.n_tokens(); ++i) {
    for (int j = 0; j < scaled.dim(); ++j) scaled.at(i, j) *= 7.5;
  }
  PooledPrompt scaled_prompt = p;
  for (double& v : scaled_prompt.values) v *= 0.25;
  const auto plan_c = plan_mask(scaled, scaled_prompt, cfg);
  CHECK(plan_a.retained == plan_c.retained);
  CHECK(plan_a.masked == plan_c.masked);
  CHECK(plan_a.kept == plan_c.kept);
}

TEST_CASE("plan_mask breaks importance ties by lower index") {
  // All tokens identical: importance ties everywhere, so the protected
  // slots go to the lowest indices.
  const auto vision = matrix_of(6, 2, {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
  MaskConfig cfg;
  cfg.retain_fraction = 0.5;
  const auto plan = plan_mask(vision, prompt_of({1, 0}), cfg);
  CHECK(plan.retained == std::vector<int>{0, 1, 2});
}

TEST_CASE("bernoulli masked count matches the binomial mean over seeds") {
  // N=200, k=.10 -> 20 retained, 180 candidates at p=.05: binomial mean 9,
  // sigma = sqrt(180 * .05 * .95) ~ 2.924. The mean over 10k independent
  // seeds must land within 3 standard errors of 9.
  const auto vision = random_tokens(200, 4, 55);
  const auto p = prompt_of({0.1, 0.7, -0.4, 0.2});
  MaskConfig cfg;
  cfg.retain_fraction = 0.10;
  cfg.mask_probability = 0.05;
  cfg.mode = MaskMode::kBernoulli;

  double total = 0.0;
  constexpr int kTrials = 10000;
  for (int t = 0; t < kTrials; ++t) {
    cfg.seed = 0xFACE0000 + static_cast<std::uint64_t>(t);
    total += static_cast<double>(plan_mask(vision, p, cfg).masked.size());
  }
  const double mean = total / kTrials;
  const double sigma = std::sqrt(180 * 0.05 * 0.95);
  const double tolerance = 3.0 * sigma / std::sqrt(kTrials);
  CHECK(std::abs(mean - 9.0) <= tolerance);
}

TEST_CASE("apply_mask drop and zero styles") {
  const auto vision = matrix_of(3, 2, {1, 2, 3, 4, 5, 6});
  MaskPlan plan;
  plan.importance = {0.4, 0.3, 0.3};

  SUBCASE("empty masked set is the identity") {
    CHECK(apply_mask(vision, plan, MaskStyle::kDrop) == vision);
    CHECK(apply_mask(vision, plan, MaskStyle::kZero) == vision);
  }
  SUBCASE("drop removes rows in place") {
    plan.masked = {1};
    const auto out = apply_mask(vision, plan, MaskStyle::kDrop);
    CHECK(out.n_tokens() == 2);
    CHECK(out.values() == std::vector<double>{1, 2, 5, 6});
  }
  SUBCASE("zero blanks rows and keeps N") {
    plan.masked = {0};
    const auto out = apply_mask(vision, plan, MaskStyle::kZero);
    CHECK(out.n_tokens() == 3);
    CHECK(out.values() == std::vector<double>{0, 0, 3, 4, 5, 6});
  }
  SUBCASE("out-of-range index is rejected") {
    plan.masked = {7};
    CHECK_THROWS_AS(apply_mask(vision, plan, MaskStyle::kDrop), BoundsError);
  }
}

TEST_CASE("importance_map renders a rescaled grid") {
  SUBCASE("uniform importance maps to all 255") {
    const std::vector<double> s = {0.25, 0.25, 0.25, 0.25};
    const auto img = importance_map(s, 2, 2);
    for (auto v : img.pixels) CHECK(v == 255);
  }
  SUBCASE("a dominant token saturates its own cell only") {
    const std::vector<double> s = {0.7, 0.1, 0.1, 0.1};
    const auto img = importance_map(s, 2, 2);
    CHECK(img.pixels[0] == 255);
    for (int i = 1; i < 4; ++i) CHECK(img.pixels[i] < 255);
  }
  SUBCASE("linear rescale with round-half-up") {
    const std::vector<double> s = {0.4, 0.3, 0.2, 0.1};
    const auto img = importance_map(s, 4, 1);
    CHECK(img.pixels == std::vector<std::uint8_t>{255, 191, 128, 64});
  }
  SUBCASE("grid size mismatch is rejected") {
    const std::vector<double> s = {0.5, 0.5};
    CHECK_THROWS_AS(importance_map(s, 2, 2), SizeError);
  }
}

TEST_CASE("tokmat round-trips through the binary container") {
  // Values written as binary32 must survive exactly when they start as
  // binary32-representable numbers.
  SplitMix64 rng(31337);
  std::vector<double> values(6 * 3);
  for (double& v : values) {
    v = static_cast<double>(static_cast<float>(rng.next_gaussian()));
  }
  const TokenMatrix m(6, 3, values);
  const auto bytes = write_tokmat(m);
  const std::string head(bytes.begin(), bytes.begin() + 11);
  CHECK(head == "TOKMAT 6 3\n");
  CHECK(read_tokmat(bytes).values() == m.values());
}

TEST_CASE("tokmat rejects malformed containers") {
  const TokenMatrix m(2, 2, {1, 2, 3, 4});
  auto bytes = write_tokmat(m);

  SUBCASE("bad magic") {
    bytes[0] = 'X';
    CHECK_THROWS_AS(read_tokmat(bytes), ParseError);
  }
  SUBCASE("truncated payload") {
    bytes.pop_back();
    CHECK_THROWS_AS(read_tokmat(bytes), ParseError);
  }
  SUBCASE("trailing bytes") {
    bytes.push_back(0);
    CHECK_THROWS_AS(read_tokmat(bytes), ParseError);
  }
  SUBCASE("non-finite payload") {
    // 0x7FC00000 is a quiet NaN; payload starts after "TOKMAT 2 2\n".
    bytes[11] = 0x00;
    bytes[12] = 0x00;
    bytes[13] = 0xC0;
    bytes[14] = 0x7F;
    CHECK_THROWS_AS(read_tokmat(bytes), ParseError);
  }
}

TEST_CASE("mask plan serializes to json and back") {
  const auto vision = random_tokens(12, 4, 2024);
  const auto p = prompt_of({1, -1, 0.5, 0.25});
  MaskConfig cfg;
  cfg.retain_fraction = 0.25;
  cfg.mask_probability = 0.5;
  cfg.mode = MaskMode::kFixedCount;
  cfg.seed = 42;
  const auto plan = plan_mask(vision, p, cfg);

  const std::string json_text = mask_plan_to_json(plan);
  const auto parsed = mask_plan_from_json(json_text);
  CHECK(parsed.retained == plan.retained);
  CHECK(parsed.masked == plan.masked);
  CHECK(parsed.kept == plan.kept);
  CHECK(parsed.seed == plan.seed);
  CHECK(parsed.config.mode == MaskMode::kFixedCount);
  CHECK(parsed.importance.size() == plan.importance.size());

  CHECK_THROWS_AS(mask_plan_from_json("{not json"), ParseError);
}

}  // TEST_SUITE
