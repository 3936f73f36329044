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
#ifndef FSK_DATAGEN_HPP_
#define FSK_DATAGEN_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fsk/error.hpp"
#include "fsk/taskproto.hpp"

namespace fsk {

// A transport-level failure talking to an external service. Callers may
// retry the run; nothing is silently dropped.
class TransportError : public Error {
 public:
  using Error::Error;
};

struct AssistantRequest {
  std::string system;
  std::string prompt;
  std::string image_b64;
};

// Text-generation backend used to draft captions, descriptions, and
// question paraphrases. The wire implementation POSTs
// {system, prompt, image_b64} and expects 200 {text}; the mock is a pure
// function of the request, so corpora built with it are byte-identical
// across runs.
class AssistantClient {
 public:
  virtual ~AssistantClient() = default;
  virtual std::string generate(const AssistantRequest& request) = 0;
};

class HttpAssistantClient : public AssistantClient {
 public:
  explicit HttpAssistantClient(std::string url, int timeout_seconds = 30);
  std::string generate(const AssistantRequest& request) override;

 private:
  std::string url_;
  int timeout_seconds_;
};

class MockAssistant : public AssistantClient {
 public:
  std::string generate(const AssistantRequest& request) override;
};

// Image/text similarity in [0, 1], applied to a record's image and its
// first assistant turn. Backed by HTTP ({text, image_b64} -> {score}), a
// constant, or an id-keyed table; any scorer failure aborts the run so
// filtering decisions stay auditable.
struct InstructionRecord;
using RecordScorer = std::function<double(const InstructionRecord&)>;

RecordScorer make_http_scorer(const std::string& url,
                              int timeout_seconds = 30);
RecordScorer make_const_scorer(double score);
// JSON file: either {"<record id>": score, ...} or a bare array applied to
// records in order of appearance.
RecordScorer make_table_scorer(const std::string& json_path);

struct ConversationTurn {
  std::string role;  // "human" | "assistant"
  std::string text;

  bool operator==(const ConversationTurn&) const = default;
};

// One instruction-dataset unit: alternating turns starting with "human",
// at least one QA pair. `task` is a TaskKind name or "pretrain".
struct InstructionRecord {
  std::string id;
  std::string image_path;
  std::string task;
  std::vector<ConversationTurn> conversations;

  void validate() const;
  const std::string& first_assistant_text() const;

  bool operator==(const InstructionRecord&) const = default;
};

struct SkippedRecord {
  std::string id;
  std::string reason;
};

struct GenerationResult {
  std::vector<InstructionRecord> records;
  std::vector<SkippedRecord> skipped;
};

// Builds one InstructionRecord per annotation for `task_name` (a TaskKind
// name or "pretrain"). Questions rotate round-robin through the template
// pool by input ordinal; answers are rendered from the answer pools with
// the gold class / box substituted, so the taskproto parsers recover the
// gold label by construction. Assistant text fills the caption
// (pretrain) and the {description} slot (reasoning). Records the assistant
// answers unusably for (empty output, missing localization box) are
// skipped with a reason; transport failures abort with a TransportError
// naming the record.
GenerationResult generate(const std::vector<CatalogRecord>& records,
                          const std::string& task_name,
                          AssistantClient& assistant,
                          const TemplateSet& templates,
                          const SynonymTable& synonyms);

struct FilterReport {
  long input_count = 0;
  long kept = 0;
  long dropped_by_similarity = 0;
  long dropped_by_keyword = 0;
  long dropped_by_manual = 0;
  double threshold = 0.0;
};
std::string filter_report_to_json(const FilterReport& report);

// Keeps records whose score is >= threshold (strictly-below scores are
// removed). Scores outside [0, 1] and scorer exceptions are hard errors.
std::pair<std::vector<InstructionRecord>, FilterReport> similarity_filter(
    const std::vector<InstructionRecord>& records, const RecordScorer& scorer,
    double threshold = 0.15);

// Gold-consistency policy for keyword filtering: each record's answer must
// still contain its task's required gold keyword (class synonym, verdict
// cue, or box), looked up from the source catalog by base record id.
struct RequiredKeywordPolicy {
  const SynonymTable* synonyms = nullptr;
  std::map<std::string, CatalogRecord> gold_by_id;

  static RequiredKeywordPolicy from_catalog(
      const std::vector<CatalogRecord>& catalog, const SynonymTable& synonyms);
};

// Drops records whose assistant text contains a banned phrase
// (case-insensitive substring) or fails the required-keyword policy.
// Pass an empty policy (no synonyms) to skip the gold check.
std::pair<std::vector<InstructionRecord>, FilterReport> keyword_filter(
    const std::vector<InstructionRecord>& records,
    const std::vector<std::string>& banned,
    const RequiredKeywordPolicy& policy);

std::vector<std::string> load_banned_phrases(const std::string& json_path);

// Manual-review stage: drops records whose id appears in the exclusion
// list (one id per line, '#' comments allowed).
std::pair<std::vector<InstructionRecord>, FilterReport> manual_filter(
    const std::vector<InstructionRecord>& records,
    const std::vector<std::string>& excluded_ids);
std::vector<std::string> load_exclusion_ids(const std::string& path);

// Asks the assistant for n paraphrases of each record's human turns;
// assistant turns are preserved verbatim so labels cannot drift. Output
// holds the originals followed by accepted variants (ids suffixed "#1",
// "#2", ...); variants that lose the <image> placeholder or come back
// empty are rejected into `skipped`.
GenerationResult augment(const std::vector<InstructionRecord>& records,
                         AssistantClient& assistant, int n_variants);

struct CorpusManifest {
  long total = 0;
  std::map<std::string, long> counts_by_task;
  std::string content_hash;  // "fnv1a64:<16 hex digits>" over the file bytes
};
std::string corpus_manifest_to_json(const CorpusManifest& manifest);

// Writes records as JSON-lines, UTF-8, sorted by id, and returns the
// manifest. Two runs over equal inputs produce identical bytes and hash.
CorpusManifest write_corpus(const std::vector<InstructionRecord>& records,
                            const std::string& path);
std::vector<InstructionRecord> load_corpus(const std::string& path);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);

}  // namespace fsk

#endif  // FSK_DATAGEN_HPP_
