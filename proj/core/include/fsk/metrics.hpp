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
#ifndef FSK_METRICS_HPP_
#define FSK_METRICS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "fsk/image.hpp"

namespace fsk {

// Binary decision tallies. The positive class is "spoof/attack", the
// negative class is "bonafide"; every rate below is oriented by that
// convention.
struct ConfusionCounts {
  long tp = 0;  // spoof predicted spoof
  long tn = 0;  // bonafide predicted bonafide
  long fp = 0;  // bonafide predicted spoof
  long fn = 0;  // spoof predicted bonafide

  long total() const { return tp + tn + fp + fn; }
};

// Tokenized hypothesis/reference pair. Tokens come from fsk::tokenize so
// text metrics and prompt embedding agree on segmentation.
struct TextPair {
  std::vector<std::string> hypothesis;
  std::vector<std::string> reference;
};
TextPair make_text_pair(const std::string& hypothesis_raw,
                        const std::string& reference_raw);

// 100 * (tp + tn) / total. Throws on empty counts.
double accuracy(const ConfusionCounts& c);

// False acceptance rate: attacks accepted as bonafide, fn / (fn + tp).
double far(const ConfusionCounts& c);
// False rejection rate: bonafide rejected as attack, fp / (fp + tn).
double frr(const ConfusionCounts& c);
// Half total error rate: 100 * (FAR + FRR) / 2. Requires at least one
// sample of each class.
double hter(const ConfusionCounts& c);

// BLEU-n, n in 1..4: geometric mean of modified i-gram precisions
// (clipped counts) for i = 1..n, times the brevity penalty
// min(1, exp(1 - |ref|/|hyp|)). Any zero precision yields 0.
double bleu_n(const TextPair& pair, int n);

// ROUGE-L F-score with beta = 1.2: P = LCS/|hyp|, R = LCS/|ref|,
// F = (1 + b^2) P R / (R + b^2 P); 0 when the LCS is empty.
double rouge_l(const TextPair& pair);

// METEOR, exact-match stage only (no stemming or synonymy): unigram
// alignment maximizing matches then minimizing chunks;
// Fmean = 10PR/(R + 9P), penalty = 0.5 (chunks/matches)^3,
// score = Fmean (1 - penalty). The chunk minimization is exact for
// sentence-sized inputs (branch and bound with a node budget; pathological
// repetition beyond the budget falls back to the best alignment found).
double meteor_exact(const TextPair& pair);

// Intersection over union of two boxes under the inclusive-exclusive
// convention.
double iou(const BBox& a, const BBox& b);

// Localization sample: what the model emitted vs annotation. Either side
// may be absent (bonafide images have no gold box; a response may not
// contain one).
struct LocalizationSample {
  std::optional<BBox> predicted;
  std::optional<BBox> gold;
};

// Percentage of samples scored correct at IoU threshold tau: correct means
// both boxes absent, or both present with iou >= tau (equality counts).
// tau must lie in (0, 1); the sample list must be non-empty.
double ap_at(const std::vector<LocalizationSample>& samples, double tau);

// Aggregated per-task report. Fields that do not apply to the task stay
// unset and serialize as null.
struct MetricReport {
  std::string task;
  long n_samples = 0;
  std::optional<double> acc;
  std::optional<double> hter;
  std::optional<double> bleu1;
  std::optional<double> bleu2;
  std::optional<double> bleu3;
  std::optional<double> bleu4;
  std::optional<double> rouge_l;
  std::optional<double> meteor;
  std::optional<double> ap40;
  std::optional<double> ap50;
  std::optional<double> far;
  std::optional<double> frr;
};
std::string metric_report_to_json(const MetricReport& report);

}  // namespace fsk

#endif  // FSK_METRICS_HPP_
