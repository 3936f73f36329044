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
#ifndef FSK_TASKPROTO_HPP_
#define FSK_TASKPROTO_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fsk/image.hpp"

namespace fsk {

// The closed 12-class taxonomy. Bonafide is the sole negative class; the
// other eleven are presentation attacks.
enum class AttackClass : std::uint8_t {
  kBonafide,
  kFakehead,
  kPrint,
  kGlasses,
  kReplay,
  kPaperMask,
  kFlexibleMask,
  kRigidMask,
  kPartialEye,
  kPartialMouth,
  kMakeup,
  kTattoo,
};
inline constexpr int kAttackClassCount = 12;

const std::string& attack_class_name(AttackClass cls);
std::optional<AttackClass> attack_class_from_name(const std::string& name);
std::vector<AttackClass> all_attack_classes();

enum class TaskKind : std::uint8_t {
  kCoarse,
  kFine,
  kReasoning,
  kLocalization,
};
const std::string& task_kind_name(TaskKind task);
std::optional<TaskKind> task_kind_from_name(const std::string& name);

enum class Source : std::uint8_t { kW, kS, kP };
const std::string& source_name(Source s);
std::optional<Source> source_from_name(const std::string& name);

enum class CoarseVerdict : std::uint8_t { kBonafide, kSpoof, kUnparseable };

// Per-class synonym phrases used by the fine-grained parser and the
// keyword filter. Shipped as a data file so the table can grow without a
// rebuild; the first phrase of each class is its canonical rendering.
class SynonymTable {
 public:
  static SynonymTable load(const std::string& json_path);

  const std::vector<std::string>& phrases(AttackClass cls) const;
  const std::string& canonical(AttackClass cls) const;

 private:
  std::map<AttackClass, std::vector<std::string>> phrases_;
};

// Keyword scan for real-vs-spoof. Bonafide cues: real, bonafide, genuine,
// live; spoof cues: spoof, attack, fake, presentation attack. A cue with a
// negation word (not/no/never/without) in the 3 preceding tokens counts
// for the opposite side. Evidence on both sides, or none, is unparseable.
CoarseVerdict parse_coarse(const std::string& raw);

// Longest-match scan over the synonym table. Exactly one matched class is
// a parse; zero or several distinct classes are unparseable (nullopt).
std::optional<AttackClass> parse_fine(const std::string& raw,
                                      const SynonymTable& table);

// Extracts the first bracketed 4-number group "[x1, y1, x2, y2]". Values
// all <= 1 are treated as normalized and scaled by the image size.
// Coordinates clamp to the image; a degenerate result (x1 >= x2 or
// y1 >= y2) or a response without a usable group yields nullopt.
std::optional<BBox> parse_box(const std::string& raw, int img_w, int img_h);

// One catalog entry. `reference` carries the gold reasoning text when the
// record doubles as reasoning gold.
struct CatalogRecord {
  std::string id;
  std::string image_path;
  Source source = Source::kW;
  AttackClass cls = AttackClass::kBonafide;
  std::optional<BBox> bbox;
  std::optional<std::string> reference;
};

std::vector<CatalogRecord> load_catalog(const std::string& jsonl_path);
void save_catalog(const std::string& jsonl_path,
                  const std::vector<CatalogRecord>& records);

struct PredictionRecord {
  std::string id;
  TaskKind task = TaskKind::kCoarse;
  std::string raw_text;
  std::optional<AttackClass> parsed_label;
  std::optional<BBox> parsed_box;
};

std::vector<PredictionRecord> load_predictions(const std::string& jsonl_path);
void save_predictions(const std::string& jsonl_path,
                      const std::vector<PredictionRecord>& records);

enum class ProtocolMode : std::uint8_t { kIntra, kCross };

struct ProtocolSpec {
  ProtocolMode mode = ProtocolMode::kIntra;
  std::vector<Source> train_sources;         // cross mode only
  std::optional<Source> test_source;         // cross mode only
  double test_fraction = 0.10;
  std::uint64_t split_seed = 0;

  void validate() const;
};

struct SplitResult {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

// Deterministic splits: each source is shuffled by a seed derived from
// (split_seed, source tag) and its last floor(test_fraction * n) samples
// form that source's test subset. Intra mode trains on the rest of every
// source and tests on the union of subsets; cross mode trains on all of
// train_sources and tests on test_source's subset.
SplitResult make_splits(const std::vector<CatalogRecord>& catalog,
                        const ProtocolSpec& spec);

// Per-task question/answer template pools, shipped as JSON data files
// (one per task plus pretrain). Load validates the placeholder contract:
// every question carries the <image> token, localization attack answers
// carry {coordinates}, fine answers carry {class}, reasoning answers carry
// {verdict}.
struct TaskTemplates {
  std::string system;
  std::vector<std::string> fewshot;
  std::vector<std::string> questions;
  std::map<std::string, std::vector<std::string>> answers;
};

class TemplateSet {
 public:
  static TemplateSet load_dir(const std::string& dir);

  const TaskTemplates& for_task(TaskKind task) const;
  const TaskTemplates& pretrain() const;

 private:
  std::map<std::string, TaskTemplates> by_name_;
};

// Round-robin selection from the task's question pool by sample ordinal.
std::string render_prompt(TaskKind task, const TemplateSet& templates,
                          std::size_t ordinal);

}  // namespace fsk

#endif  // FSK_TASKPROTO_HPP_
