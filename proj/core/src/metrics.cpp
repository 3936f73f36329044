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
#include "fsk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

#include <json.hpp>

#include "fsk/error.hpp"
#include "fsk/text.hpp"

namespace fsk {

namespace {

void require_non_empty(const TextPair& pair) {
  if (pair.hypothesis.empty() || pair.reference.empty()) {
    throw DegenerateInputError("text metrics need non-empty token sequences");
  }
}

// --- METEOR chunk-minimizing alignment ---------------------------------
//
// Maximum matches per word are forced (min of the two occurrence counts);
// the only freedom is which occurrences pair up. A depth-first search over
// hyp positions assigns each matchable occurrence a ref slot, preferring
// the slot that extends the current chunk, and prunes on (a) chunk count
// already >= best and (b) not enough matchable material left to reach the
// forced maximum. A node budget caps pathological repetition; within the
// budget the result is exact.
class MeteorAligner {
 public:
  MeteorAligner(const std::vector<std::string>& hyp,
                const std::vector<std::string>& ref)
      : hyp_(hyp), ref_(ref) {
    for (std::size_t j = 0; j < ref_.size(); ++j) ref_count_[ref_[j]]++;
    std::map<std::string, int> hyp_count;
    for (const auto& w : hyp_) hyp_count[w]++;
    for (const auto& [word, count] : hyp_count) {
      auto it = ref_count_.find(word);
      if (it != ref_count_.end()) {
        max_matches_ += std::min(count, it->second);
      }
    }
  }

  int max_matches() const { return max_matches_; }

  // Minimal chunk count over all maximum-cardinality exact alignments.
  int min_chunks() {
    if (max_matches_ == 0) return 0;
    best_chunks_ = max_matches_ + 1;
    used_.assign(ref_.size(), false);
    avail_ = ref_count_;
    budget_ = 200000;
    dfs(0, -2, 0, 0);
    // Some maximum alignment always has at most one chunk per match; if the
    // budget ran out before any full solution, fall back to that bound.
    return std::min(best_chunks_, max_matches_);
  }

 private:
  // Upper bound on matches still reachable from hyp position i.
  int potential(std::size_t i) {
    std::map<std::string, int> rest;
    for (std::size_t k = i; k < hyp_.size(); ++k) rest[hyp_[k]]++;
    int total = 0;
    for (const auto& [word, count] : rest) {
      auto it = avail_.find(word);
      if (it != avail_.end()) total += std::min(count, it->second);
    }
    return total;
  }

  void dfs(std::size_t i, int last_j, int matched, int chunks) {
    if (budget_ <= 0) return;
    --budget_;
    if (chunks >= best_chunks_) return;
    if (matched + potential(i) < max_matches_) return;
    if (i == hyp_.size()) {
      if (matched == max_matches_) best_chunks_ = chunks;
      return;
    }

    const std::string& word = hyp_[i];
    auto it = avail_.find(word);
    if (it != avail_.end() && it->second > 0) {
      // Continuing the current chunk first steers the search toward good
      // solutions early.
      const int next_j = last_j + 1;
      if (next_j >= 0 && static_cast<std::size_t>(next_j) < ref_.size() &&
          !used_[next_j] && ref_[next_j] == word) {
        used_[next_j] = true;
        --it->second;
        dfs(i + 1, next_j, matched + 1, chunks);
        ++it->second;
        used_[next_j] = false;
      }
      for (std::size_t j = 0; j < ref_.size(); ++j) {
        if (used_[j] || ref_[j] != word) continue;
        if (static_cast<int>(j) == last_j + 1) continue;  // already tried
        used_[j] = true;
        --it->second;
        dfs(i + 1, static_cast<int>(j), matched + 1, chunks + 1);
        ++it->second;
        used_[j] = false;
      }
    }
    dfs(i + 1, -2, matched, chunks);  // leave hyp position i unmatched
  }

  const std::vector<std::string>& hyp_;
  const std::vector<std::string>& ref_;
  std::map<std::string, int> ref_count_;
  std::map<std::string, int> avail_;
  std::vector<bool> used_;
  int max_matches_ = 0;
  int best_chunks_ = 0;
  long budget_ = 0;
};

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  if (v.has_value()) return *v;
  return nullptr;
}

}  // namespace

TextPair make_text_pair(const std::string& hypothesis_raw,
                        const std::string& reference_raw) {
  return TextPair{tokenize(hypothesis_raw), tokenize(reference_raw)};
}

double accuracy(const ConfusionCounts& c) {
  if (c.total() < 1) throw DegenerateInputError("accuracy of empty counts");
  return 100.0 * static_cast<double>(c.tp + c.tn) /
         static_cast<double>(c.total());
}

double far(const ConfusionCounts& c) {
  if (c.fn + c.tp < 1) {
    throw DegenerateInputError("FAR undefined without attack samples");
  }
  return 100.0 * static_cast<double>(c.fn) / static_cast<double>(c.fn + c.tp);
}

double frr(const ConfusionCounts& c) {
  if (c.fp + c.tn < 1) {
    throw DegenerateInputError("FRR undefined without bonafide samples");
  }
  return 100.0 * static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
}

double hter(const ConfusionCounts& c) { return (far(c) + frr(c)) / 2.0; }

double bleu_n(const TextPair& pair, int n) {
  if (n < 1 || n > 4) throw DegenerateInputError("bleu order must be 1..4");
  require_non_empty(pair);

  const auto& hyp = pair.hypothesis;
  const auto& ref = pair.reference;
  double log_sum = 0.0;
  for (int order = 1; order <= n; ++order) {
    const long candidates =
        static_cast<long>(hyp.size()) - order + 1;
    if (candidates <= 0) return 0.0;

    // Modified precision: clip each hyp n-gram's count by its count in the
    // reference. n-grams keyed by joining tokens with an unlikely byte.
    auto ngram_counts = [order](const std::vector<std::string>& tokens) {
      std::map<std::string, long> counts;
      for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (int k = 1; k < order; ++k) {
          key.push_back('\x1f');
          key += tokens[i + k];
        }
        counts[key]++;
      }
      return counts;
    };
    const auto hyp_counts = ngram_counts(hyp);
    const auto ref_counts = ngram_counts(ref);
    long clipped = 0;
    for (const auto& [gram, count] : hyp_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) clipped += std::min(count, it->second);
    }
    if (clipped == 0) return 0.0;
    log_sum += std::log(static_cast<double>(clipped) /
                        static_cast<double>(candidates));
  }

  const double ratio =
      static_cast<double>(ref.size()) / static_cast<double>(hyp.size());
  const double bp = std::min(1.0, std::exp(1.0 - ratio));
  return bp * std::exp(log_sum / n);
}

double rouge_l(const TextPair& pair) {
  require_non_empty(pair);
  const auto& hyp = pair.hypothesis;
  const auto& ref = pair.reference;

  std::vector<std::vector<int>> dp(hyp.size() + 1,
                                   std::vector<int>(ref.size() + 1, 0));
  for (std::size_t i = 1; i <= hyp.size(); ++i) {
    for (std::size_t j = 1; j <= ref.size(); ++j) {
      dp[i][j] = hyp[i - 1] == ref[j - 1]
                     ? dp[i - 1][j - 1] + 1
                     : std::max(dp[i - 1][j], dp[i][j - 1]);
    }
  }
  const int lcs = dp[hyp.size()][ref.size()];
  if (lcs == 0) return 0.0;

  constexpr double kBeta = 1.2;
  const double p = static_cast<double>(lcs) / static_cast<double>(hyp.size());
  const double r = static_cast<double>(lcs) / static_cast<double>(ref.size());
  return ((1.0 + kBeta * kBeta) * p * r) / (r + kBeta * kBeta * p);
}

double meteor_exact(const TextPair& pair) {
  require_non_empty(pair);
  MeteorAligner aligner(pair.hypothesis, pair.reference);
  const int matches = aligner.max_matches();
  if (matches == 0) return 0.0;
  const int chunks = aligner.min_chunks();

  const double p =
      static_cast<double>(matches) / static_cast<double>(pair.hypothesis.size());
  const double r =
      static_cast<double>(matches) / static_cast<double>(pair.reference.size());
  const double f_mean = 10.0 * p * r / (r + 9.0 * p);
  const double chunk_ratio =
      static_cast<double>(chunks) / static_cast<double>(matches);
  const double penalty = 0.5 * chunk_ratio * chunk_ratio * chunk_ratio;
  return f_mean * (1.0 - penalty);
}

double iou(const BBox& a, const BBox& b) {
  const long ix = std::max(
      0L, static_cast<long>(std::min(a.x2, b.x2)) - std::max(a.x1, b.x1));
  const long iy = std::max(
      0L, static_cast<long>(std::min(a.y2, b.y2)) - std::max(a.y1, b.y1));
  const double inter = static_cast<double>(ix) * static_cast<double>(iy);
  const double uni =
      static_cast<double>(a.area()) + static_cast<double>(b.area()) - inter;
  return inter / uni;
}

double ap_at(const std::vector<LocalizationSample>& samples, double tau) {
  if (samples.empty()) {
    throw DegenerateInputError("ap_at needs at least one sample");
  }
  if (!(tau > 0.0 && tau < 1.0)) {
    throw DegenerateInputError("ap_at threshold must lie in (0, 1)");
  }
  long correct = 0;
  for (const LocalizationSample& s : samples) {
    if (!s.gold.has_value() && !s.predicted.has_value()) {
      ++correct;
    } else if (s.gold.has_value() && s.predicted.has_value() &&
               iou(*s.predicted, *s.gold) >= tau) {
      ++correct;
    }
  }
  return 100.0 * static_cast<double>(correct) /
         static_cast<double>(samples.size());
}

std::string metric_report_to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["task"] = report.task;
  j["n_samples"] = report.n_samples;
  j["acc"] = opt_json(report.acc);
  j["hter"] = opt_json(report.hter);
  if (report.bleu1 || report.bleu2 || report.bleu3 || report.bleu4) {
    j["bleu"] = {{"1", opt_json(report.bleu1)},
                 {"2", opt_json(report.bleu2)},
                 {"3", opt_json(report.bleu3)},
                 {"4", opt_json(report.bleu4)}};
  } else {
    j["bleu"] = nullptr;
  }
  j["rouge_l"] = opt_json(report.rouge_l);
  j["meteor"] = opt_json(report.meteor);
  j["ap40"] = opt_json(report.ap40);
  j["ap50"] = opt_json(report.ap50);
  j["far"] = opt_json(report.far);
  j["frr"] = opt_json(report.frr);
  return j.dump();
}

}  // namespace fsk
