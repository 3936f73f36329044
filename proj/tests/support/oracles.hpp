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
//
// Brute-force reference implementations used only by tests. Each oracle is
// deliberately naive and structurally different from the production code it
// checks: counts by rescanning instead of hash maps, subsequence
// enumeration instead of DP tables, exhaustive alignment search instead of
// branch and bound.
#ifndef FSK_TESTS_ORACLES_HPP_
#define FSK_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace fsk::testing {

using Tokens = std::vector<std::string>;

// --- BLEU ---------------------------------------------------------------

inline bool grams_equal(const Tokens& a, std::size_t ai, const Tokens& b,
                        std::size_t bi, int order) {
  for (int k = 0; k < order; ++k) {
    if (a[ai + k] != b[bi + k]) return false;
  }
  return true;
}

// Modified i-gram precision by direct position-by-position rescans.
inline double naive_modified_precision(const Tokens& hyp, const Tokens& ref,
                                       int order) {
  const long candidates = static_cast<long>(hyp.size()) - order + 1;
  if (candidates <= 0) return 0.0;

  long clipped = 0;
  for (std::size_t i = 0; i + order <= hyp.size(); ++i) {
    // Only the first occurrence of a gram contributes its clipped count.
    bool seen_before = false;
    for (std::size_t e = 0; e < i; ++e) {
      if (grams_equal(hyp, e, hyp, i, order)) {
        seen_before = true;
        break;
      }
    }
    if (seen_before) continue;

    long hyp_count = 0;
    for (std::size_t e = 0; e + order <= hyp.size(); ++e) {
      if (grams_equal(hyp, e, hyp, i, order)) ++hyp_count;
    }
    long ref_count = 0;
    for (std::size_t e = 0; e + order <= ref.size(); ++e) {
      if (grams_equal(ref, e, hyp, i, order)) ++ref_count;
    }
    clipped += std::min(hyp_count, ref_count);
  }
  return static_cast<double>(clipped) / static_cast<double>(candidates);
}

inline double naive_bleu(const Tokens& hyp, const Tokens& ref, int n) {
  double product = 1.0;
  for (int order = 1; order <= n; ++order) {
    const double p = naive_modified_precision(hyp, ref, order);
    if (p == 0.0) return 0.0;
    product *= p;
  }
  const double bp = std::min(
      1.0, std::exp(1.0 - static_cast<double>(ref.size()) /
                              static_cast<double>(hyp.size())));
  return bp * std::pow(product, 1.0 / n);
}

// --- ROUGE-L ------------------------------------------------------------

inline bool is_subsequence(const Tokens& candidate, const Tokens& sequence) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < sequence.size() && j < candidate.size(); ++i) {
    if (sequence[i] == candidate[j]) ++j;
  }
  return j == candidate.size();
}

// Longest common subsequence by enumerating every subsequence of hyp
// (hyp must stay short; tests keep it <= 12 tokens).
inline int naive_lcs(const Tokens& hyp, const Tokens& ref) {
  int best = 0;
  const std::size_t limit = std::size_t{1} << hyp.size();
  for (std::size_t mask = 0; mask < limit; ++mask) {
    Tokens candidate;
    for (std::size_t i = 0; i < hyp.size(); ++i) {
      if (mask & (std::size_t{1} << i)) candidate.push_back(hyp[i]);
    }
    if (static_cast<int>(candidate.size()) > best &&
        is_subsequence(candidate, ref)) {
      best = static_cast<int>(candidate.size());
    }
  }
  return best;
}

inline double naive_rouge_l(const Tokens& hyp, const Tokens& ref) {
  const int lcs = naive_lcs(hyp, ref);
  if (lcs == 0) return 0.0;
  constexpr double kBeta = 1.2;
  const double p = static_cast<double>(lcs) / static_cast<double>(hyp.size());
  const double r = static_cast<double>(lcs) / static_cast<double>(ref.size());
  return ((1.0 + kBeta * kBeta) * p * r) / (r + kBeta * kBeta * p);
}

// --- METEOR (exact match) -------------------------------------------------

// Exhaustive alignment enumeration: every hyp position either matches any
// unused equal ref position or stays unmatched. Tracks the maximum match
// count and, among maximal alignments, the minimal chunk count.
struct MeteorSearch {
  const Tokens& hyp;
  const Tokens& ref;
  std::vector<bool> used;
  int best_matches = 0;
  int best_chunks = 0;

  MeteorSearch(const Tokens& h, const Tokens& r)
      : hyp(h), ref(r), used(r.size(), false) {}

  void walk(std::size_t i, int last_ref, int matches, int chunks) {
    if (i == hyp.size()) {
      if (matches > best_matches ||
          (matches == best_matches && matches > 0 && chunks < best_chunks)) {
        best_matches = matches;
        best_chunks = chunks;
      }
      return;
    }
    for (std::size_t j = 0; j < ref.size(); ++j) {
      if (used[j] || ref[j] != hyp[i]) continue;
      used[j] = true;
      const bool contiguous = static_cast<int>(j) == last_ref + 1;
      walk(i + 1, static_cast<int>(j), matches + 1,
           chunks + (contiguous ? 0 : 1));
      used[j] = false;
    }
    walk(i + 1, -2, matches, chunks);
  }
};

inline double naive_meteor_exact(const Tokens& hyp, const Tokens& ref) {
  MeteorSearch search(hyp, ref);
  search.best_chunks = static_cast<int>(hyp.size()) + 1;
  search.walk(0, -2, 0, 0);
  if (search.best_matches == 0) return 0.0;

  const double m = search.best_matches;
  const double p = m / static_cast<double>(hyp.size());
  const double r = m / static_cast<double>(ref.size());
  const double f_mean = 10.0 * p * r / (r + 9.0 * p);
  const double chunk_ratio = search.best_chunks / m;
  return f_mean * (1.0 - 0.5 * chunk_ratio * chunk_ratio * chunk_ratio);
}

}  // namespace fsk::testing

#endif  // FSK_TESTS_ORACLES_HPP_
