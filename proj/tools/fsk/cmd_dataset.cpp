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
#include <memory>

#include "commands.hpp"
#include "fsk/datagen.hpp"
#include "fsk/error.hpp"
#include "fsk/taskproto.hpp"

namespace fsk::cli {

namespace {

struct DatasetOptions {
  // build
  std::string catalog_path;
  std::string out_path;
  std::string task = "all";
  bool mock = false;
  // filter
  std::string corpus_path;
  double threshold = 0.15;
  double mock_score = -1.0;  // <0 means unset
  std::string scores_path;
  std::string banned_path;
  std::string exclude_path;
  bool no_keyword = false;
  // augment
  int variants = 1;
};

std::unique_ptr<AssistantClient> make_assistant(const DatasetOptions& opt,
                                                const GlobalConfig& cfg) {
  if (opt.mock) return std::make_unique<MockAssistant>();
  const auto url = cfg.assistant_url();
  if (!url.has_value()) {
    throw DegenerateInputError(
        "no assistant configured: pass --mock or set --assistant-url / "
        "FSK_ASSISTANT_URL");
  }
  return std::make_unique<HttpAssistantClient>(*url);
}

void print_generation_log(const GenerationResult& result) {
  for (const auto& skip : result.skipped) {
    std::cerr << "skipped " << skip.id << ": " << skip.reason << "\n";
  }
}

void run_build(const DatasetOptions& opt, const GlobalConfig& cfg) {
  const auto catalog = load_catalog(opt.catalog_path);
  const auto templates = TemplateSet::load_dir(cfg.data_dir() + "/templates");
  const auto synonyms = SynonymTable::load(cfg.data_dir() + "/synonyms.json");
  const auto assistant = make_assistant(opt, cfg);

  std::vector<std::string> tasks;
  if (opt.task == "all") {
    tasks = {"coarse", "fine", "reasoning", "localization", "pretrain"};
  } else {
    tasks = {opt.task};
  }

  std::vector<InstructionRecord> records;
  for (const std::string& task : tasks) {
    const auto result =
        generate(catalog, task, *assistant, templates, synonyms);
    print_generation_log(result);
    records.insert(records.end(), result.records.begin(),
                   result.records.end());
  }

  const CorpusManifest manifest = write_corpus(records, opt.out_path);
  write_text_atomic(opt.out_path + ".manifest.json",
                    corpus_manifest_to_json(manifest) + "\n");
  std::cout << corpus_manifest_to_json(manifest) << "\n";
}

void run_filter(const DatasetOptions& opt, const GlobalConfig& cfg) {
  auto records = load_corpus(opt.corpus_path);

  FilterReport merged;
  merged.input_count = static_cast<long>(records.size());
  merged.threshold = opt.threshold;

  if (!opt.exclude_path.empty()) {
    auto [kept, report] =
        manual_filter(records, load_exclusion_ids(opt.exclude_path));
    records = std::move(kept);
    merged.dropped_by_manual = report.dropped_by_manual;
  }

  RecordScorer scorer;
  if (opt.mock_score >= 0.0) {
    scorer = make_const_scorer(opt.mock_score);
  } else if (!opt.scores_path.empty()) {
    scorer = make_table_scorer(opt.scores_path);
  } else if (const auto url = cfg.scorer_url()) {
    scorer = make_http_scorer(*url);
  }
  if (scorer) {
    auto [kept, report] = similarity_filter(records, scorer, opt.threshold);
    records = std::move(kept);
    merged.dropped_by_similarity = report.dropped_by_similarity;
  }

  if (!opt.no_keyword) {
    std::vector<std::string> banned;
    const std::string banned_path = opt.banned_path.empty()
                                        ? cfg.data_dir() + "/banned_phrases.json"
                                        : opt.banned_path;
    banned = load_banned_phrases(banned_path);

    RequiredKeywordPolicy policy;  // banned-only unless gold is available
    const auto synonyms =
        SynonymTable::load(cfg.data_dir() + "/synonyms.json");
    if (!opt.catalog_path.empty()) {
      policy = RequiredKeywordPolicy::from_catalog(
          load_catalog(opt.catalog_path), synonyms);
    }
    auto [kept, report] = keyword_filter(records, banned, policy);
    records = std::move(kept);
    merged.dropped_by_keyword = report.dropped_by_keyword;
  }

  merged.kept = static_cast<long>(records.size());

  const CorpusManifest manifest = write_corpus(records, opt.out_path);
  write_text_atomic(opt.out_path + ".manifest.json",
                    corpus_manifest_to_json(manifest) + "\n");
  write_text_atomic(opt.out_path + ".report.json",
                    filter_report_to_json(merged) + "\n");
  std::cout << filter_report_to_json(merged) << "\n";
}

void run_augment(const DatasetOptions& opt, const GlobalConfig& cfg) {
  const auto records = load_corpus(opt.corpus_path);
  const auto assistant = make_assistant(opt, cfg);

  const GenerationResult result = augment(records, *assistant, opt.variants);
  print_generation_log(result);

  const CorpusManifest manifest = write_corpus(result.records, opt.out_path);
  write_text_atomic(opt.out_path + ".manifest.json",
                    corpus_manifest_to_json(manifest) + "\n");
  std::cout << corpus_manifest_to_json(manifest) << "\n";
}

}  // namespace

void register_dataset(CLI::App& app, GlobalConfig& cfg) {
  auto opt = std::make_shared<DatasetOptions>();
  CLI::App* cmd = app.add_subcommand(
      "dataset", "build, filter, or augment instruction corpora");
  cmd->require_subcommand(1);

  CLI::App* build = cmd->add_subcommand(
      "build", "generate instruction records from an annotated catalog");
  build->add_option("--catalog", opt->catalog_path, "catalog JSONL")
      ->required();
  build->add_option("--out", opt->out_path, "corpus JSONL output")->required();
  build
      ->add_option("--task", opt->task,
                   "coarse | fine | reasoning | localization | pretrain | all")
      ->default_val("all")
      ->check(CLI::IsMember(
          {"coarse", "fine", "reasoning", "localization", "pretrain", "all"}));
  build->add_flag("--mock", opt->mock, "use the deterministic mock assistant");
  build->callback([opt, &cfg] {
    if (cfg.verbose) cfg.print_effective(std::cerr);
    run_build(*opt, cfg);
  });

  CLI::App* filter = cmd->add_subcommand(
      "filter", "similarity + keyword + manual-review filtering");
  filter->add_option("--corpus", opt->corpus_path, "corpus JSONL input")
      ->required();
  filter->add_option("--out", opt->out_path, "filtered corpus output")
      ->required();
  filter->add_option("--catalog", opt->catalog_path,
                     "catalog JSONL for the gold-keyword policy");
  filter->add_option("--threshold", opt->threshold,
                     "similarity threshold (keep score >= threshold)")
      ->default_val(0.15);
  filter->add_option("--mock-score", opt->mock_score,
                     "constant similarity score for every record");
  filter->add_option("--scores", opt->scores_path,
                     "JSON score table ({id: score} or an array)");
  filter->add_option("--banned", opt->banned_path,
                     "banned phrase list (default data dir)");
  filter->add_option("--exclude", opt->exclude_path,
                     "manual-review exclusion id file");
  filter->add_flag("--no-keyword", opt->no_keyword,
                   "skip the keyword filtering stage");
  filter->callback([opt, &cfg] {
    if (cfg.verbose) cfg.print_effective(std::cerr);
    run_filter(*opt, cfg);
  });

  CLI::App* augment_cmd = cmd->add_subcommand(
      "augment", "paraphrase human turns to diversify a corpus");
  augment_cmd->add_option("--corpus", opt->corpus_path, "corpus JSONL input")
      ->required();
  augment_cmd->add_option("--out", opt->out_path, "augmented corpus output")
      ->required();
  augment_cmd->add_option("--variants", opt->variants,
                          "paraphrase variants per record")
      ->default_val(1);
  augment_cmd->add_flag("--mock", opt->mock,
                        "use the deterministic mock assistant");
  augment_cmd->callback([opt, &cfg] {
    if (cfg.verbose) cfg.print_effective(std::cerr);
    run_augment(*opt, cfg);
  });
}

}  // namespace fsk::cli
