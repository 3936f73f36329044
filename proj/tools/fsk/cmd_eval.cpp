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
#include <map>

#include "commands.hpp"
#include "fsk/error.hpp"
#include "fsk/image.hpp"
#include "fsk/metrics.hpp"
#include "fsk/taskproto.hpp"

namespace fsk::cli {

namespace {

struct EvalOptions {
  std::string task;
  std::string predictions_path;
  std::string gold_path;
  std::string report_path;
  std::string synonyms_path;
  // Canvas used for normalized boxes when the sample's image file is not
  // on disk. Large enough that absolute pixel boxes pass through unclamped.
  int assume_w = 4096;
  int assume_h = 4096;
};

std::pair<int, int> image_dims_or_assumed(const std::string& path,
                                          const EvalOptions& opt) {
  std::error_code ec;
  if (!path.empty() && std::filesystem::exists(path, ec)) {
    try {
      const RasterImage img = load_ppm(path);
      return {img.width, img.height};
    } catch (const Error&) {
      // fall through to the assumed canvas
    }
  }
  return {opt.assume_w, opt.assume_h};
}

void run_eval(const EvalOptions& opt) {
  const auto task = task_kind_from_name(opt.task);
  if (!task.has_value()) {
    throw DegenerateInputError("unknown task \"" + opt.task + "\"");
  }

  const auto gold = load_catalog(opt.gold_path);
  const auto predictions = load_predictions(opt.predictions_path);

  std::map<std::string, const PredictionRecord*> by_id;
  for (const auto& pred : predictions) {
    if (!by_id.emplace(pred.id, &pred).second) {
      throw DegenerateInputError("duplicate prediction id " + pred.id);
    }
  }

  std::string unmatched;
  std::map<std::string, bool> gold_seen;
  for (const auto& rec : gold) {
    gold_seen[rec.id] = true;
    if (by_id.find(rec.id) == by_id.end()) {
      unmatched += " missing-prediction:" + rec.id;
    }
  }
  for (const auto& pred : predictions) {
    if (gold_seen.find(pred.id) == gold_seen.end()) {
      unmatched += " missing-gold:" + pred.id;
    }
  }
  if (!unmatched.empty()) {
    throw DegenerateInputError("prediction/gold ids do not align:" +
                               unmatched);
  }

  MetricReport report;
  report.task = task_kind_name(*task);
  report.n_samples = static_cast<long>(gold.size());

  if (*task == TaskKind::kCoarse || *task == TaskKind::kReasoning) {
    ConfusionCounts counts;
    for (const auto& rec : gold) {
      const CoarseVerdict verdict = parse_coarse(by_id.at(rec.id)->raw_text);
      const bool gold_spoof = rec.cls != AttackClass::kBonafide;
      // Unparseable responses score as incorrect for their gold side.
      const bool predicted_spoof = verdict == CoarseVerdict::kSpoof ||
                                   (verdict == CoarseVerdict::kUnparseable &&
                                    !gold_spoof);
      if (gold_spoof) {
        (predicted_spoof ? counts.tp : counts.fn)++;
      } else {
        (predicted_spoof ? counts.fp : counts.tn)++;
      }
    }
    report.acc = accuracy(counts);
    // HTER needs at least one sample of each class; a one-class gold set
    // reports null rates rather than failing the whole evaluation.
    try {
      report.hter = hter(counts);
      report.far = far(counts);
      report.frr = frr(counts);
    } catch (const DegenerateInputError&) {
    }
  }

  if (*task == TaskKind::kFine) {
    const SynonymTable synonyms = SynonymTable::load(opt.synonyms_path);
    long correct = 0;
    for (const auto& rec : gold) {
      const auto parsed = parse_fine(by_id.at(rec.id)->raw_text, synonyms);
      if (parsed.has_value() && *parsed == rec.cls) ++correct;
    }
    report.acc = 100.0 * static_cast<double>(correct) /
                 static_cast<double>(gold.size());
  }

  if (*task == TaskKind::kReasoning) {
    std::string missing;
    for (const auto& rec : gold) {
      if (!rec.reference.has_value()) missing += " " + rec.id;
    }
    if (!missing.empty()) {
      throw DegenerateInputError(
          "reasoning gold records lack reference text:" + missing);
    }

    double b1 = 0, b2 = 0, b3 = 0, b4 = 0, rl = 0, mt = 0;
    for (const auto& rec : gold) {
      const TextPair pair =
          make_text_pair(by_id.at(rec.id)->raw_text, *rec.reference);
      b1 += bleu_n(pair, 1);
      b2 += bleu_n(pair, 2);
      b3 += bleu_n(pair, 3);
      b4 += bleu_n(pair, 4);
      rl += rouge_l(pair);
      mt += meteor_exact(pair);
    }
    const double n = static_cast<double>(gold.size());
    report.bleu1 = b1 / n;
    report.bleu2 = b2 / n;
    report.bleu3 = b3 / n;
    report.bleu4 = b4 / n;
    report.rouge_l = rl / n;
    report.meteor = mt / n;
  }

  if (*task == TaskKind::kLocalization) {
    std::vector<LocalizationSample> samples;
    samples.reserve(gold.size());
    for (const auto& rec : gold) {
      const auto [w, h] = image_dims_or_assumed(rec.image_path, opt);
      LocalizationSample sample;
      sample.predicted = parse_box(by_id.at(rec.id)->raw_text, w, h);
      sample.gold = rec.bbox;
      samples.push_back(sample);
    }
    report.ap40 = ap_at(samples, 0.4);
    report.ap50 = ap_at(samples, 0.5);
  }

  const std::string json_text = metric_report_to_json(report);
  std::cout << json_text << "\n";
  if (!opt.report_path.empty()) {
    write_text_atomic(opt.report_path, json_text + "\n");
  }
}

}  // namespace

void register_eval(CLI::App& app, GlobalConfig& cfg) {
  auto opt = std::make_shared<EvalOptions>();
  CLI::App* cmd = app.add_subcommand(
      "eval", "score predictions against gold annotations for one task");
  cmd->add_option("--task", opt->task,
                  "coarse | fine | reasoning | localization")
      ->required();
  cmd->add_option("--predictions", opt->predictions_path,
                  "predictions JSONL ({id, task, raw_text})")
      ->required();
  cmd->add_option("--gold", opt->gold_path,
                  "gold catalog JSONL (class/bbox/reference)")
      ->required();
  cmd->add_option("--report", opt->report_path, "metric report JSON output");
  cmd->add_option("--assume-width", opt->assume_w,
                  "canvas width when the image file is absent")
      ->default_val(4096);
  cmd->add_option("--assume-height", opt->assume_h,
                  "canvas height when the image file is absent")
      ->default_val(4096);

  cmd->callback([opt, &cfg] {
    if (cfg.verbose) cfg.print_effective(std::cerr);
    opt->synonyms_path = cfg.data_dir() + "/synonyms.json";
    run_eval(*opt);
  });
}

}  // namespace fsk::cli
