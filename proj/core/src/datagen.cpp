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
#include "fsk/datagen.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "fsk/image.hpp"
#include "fsk/rng.hpp"
#include "fsk/text.hpp"

namespace fsk {

namespace {

struct HttpTarget {
  std::string host;
  int port = 80;
  std::string path = "/";
};

HttpTarget parse_http_url(const std::string& url) {
  static constexpr std::string_view kScheme = "http://";
  if (url.rfind(kScheme, 0) != 0) {
    throw DegenerateInputError("only http:// endpoints are supported, got " +
                               url);
  }
  HttpTarget target;
  const std::string rest = url.substr(kScheme.size());
  const std::size_t slash = rest.find('/');
  std::string authority = slash == std::string::npos ? rest
                                                     : rest.substr(0, slash);
  if (slash != std::string::npos) target.path = rest.substr(slash);
  const std::size_t colon = authority.find(':');
  if (colon != std::string::npos) {
    target.host = authority.substr(0, colon);
    target.port = std::stoi(authority.substr(colon + 1));
  } else {
    target.host = authority;
  }
  if (target.host.empty()) {
    throw DegenerateInputError("no host in endpoint url " + url);
  }
  return target;
}

nlohmann::json post_json(const HttpTarget& target, int timeout_seconds,
                         const nlohmann::json& body) {
  httplib::Client client(target.host, target.port);
  client.set_connection_timeout(timeout_seconds, 0);
  client.set_read_timeout(timeout_seconds, 0);
  const httplib::Result res =
      client.Post(target.path, body.dump(), "application/json");
  if (!res) {
    throw TransportError("request to " + target.host + ":" +
                         std::to_string(target.port) + target.path +
                         " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("endpoint " + target.path + " returned status " +
                         std::to_string(res->status));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw TransportError(std::string("endpoint returned invalid JSON: ") +
                         e.what());
  }
}

std::string replace_all(std::string text, const std::string& needle,
                        const std::string& replacement) {
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.replace(pos, needle.size(), replacement);
    pos += replacement.size();
  }
  return text;
}

std::string coordinates_string(const BBox& box) {
  return "[" + std::to_string(box.x1) + ", " + std::to_string(box.y1) + ", " +
         std::to_string(box.x2) + ", " + std::to_string(box.y2) + "]";
}

std::string image_b64_or_empty(const std::string& path) {
  std::error_code ec;
  if (path.empty() || !std::filesystem::exists(path, ec)) return "";
  return base64_encode(read_file_bytes(path));
}

bool blank(const std::string& text) {
  return std::all_of(text.begin(), text.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

// Base record id: strips an augmentation suffix ("#2") and the task suffix
// (".coarse") that generate() appended.
std::string base_record_id(const InstructionRecord& rec) {
  std::string id = rec.id.substr(0, rec.id.find('#'));
  const std::string suffix = "." + rec.task;
  if (id.size() > suffix.size() &&
      id.compare(id.size() - suffix.size(), suffix.size(), suffix) == 0) {
    id.resize(id.size() - suffix.size());
  }
  return id;
}

nlohmann::ordered_json record_to_json(const InstructionRecord& rec) {
  nlohmann::ordered_json j;
  j["id"] = rec.id;
  j["image_path"] = rec.image_path;
  j["task"] = rec.task;
  nlohmann::ordered_json turns = nlohmann::ordered_json::array();
  for (const ConversationTurn& turn : rec.conversations) {
    turns.push_back({{"role", turn.role}, {"text", turn.text}});
  }
  j["conversations"] = std::move(turns);
  return j;
}

}  // namespace

HttpAssistantClient::HttpAssistantClient(std::string url, int timeout_seconds)
    : url_(std::move(url)), timeout_seconds_(timeout_seconds) {
  parse_http_url(url_);  // fail fast on malformed endpoints
}

std::string HttpAssistantClient::generate(const AssistantRequest& request) {
  const nlohmann::json body = {{"system", request.system},
                               {"prompt", request.prompt},
                               {"image_b64", request.image_b64}};
  const nlohmann::json reply =
      post_json(parse_http_url(url_), timeout_seconds_, body);
  if (!reply.contains("text") || !reply["text"].is_string()) {
    throw TransportError("assistant reply lacks a \"text\" field");
  }
  return reply["text"].get<std::string>();
}

std::string MockAssistant::generate(const AssistantRequest& request) {
  const std::string system_lower = to_lower(request.system);
  if (system_lower.find("paraphrase") != std::string::npos) {
    // Variant ordinal rides on the end of the system string.
    std::size_t end = request.system.size();
    while (end > 0 &&
           std::isdigit(static_cast<unsigned char>(request.system[end - 1]))) {
      --end;
    }
    const std::string ordinal = request.system.substr(end);
    return request.prompt + " (rephrased " + (ordinal.empty() ? "0" : ordinal) +
           ")";
  }

  // Canned cue-free descriptions; choice is a pure function of the request
  // so repeated runs stay byte-identical.
  static const std::vector<std::string> kDescriptions = {
      "The skin texture appears smooth with even studio lighting.",
      "Surface reflections are soft and the facial geometry looks consistent.",
      "Illumination is uniform across the cheeks and forehead.",
      "Edges around the jawline show mild blur with balanced contrast.",
      "Color response is steady and shadows fall softly around the nose.",
  };
  const std::uint64_t h =
      fnv1a64(request.prompt, fnv1a64(request.system));
  return kDescriptions[h % kDescriptions.size()];
}

RecordScorer make_http_scorer(const std::string& url, int timeout_seconds) {
  const HttpTarget target = parse_http_url(url);
  return [target, timeout_seconds](const InstructionRecord& rec) {
    const nlohmann::json body = {
        {"text", rec.first_assistant_text()},
        {"image_b64", image_b64_or_empty(rec.image_path)}};
    const nlohmann::json reply = post_json(target, timeout_seconds, body);
    if (!reply.contains("score") || !reply["score"].is_number()) {
      throw TransportError("scorer reply lacks a numeric \"score\" field");
    }
    return reply["score"].get<double>();
  };
}

RecordScorer make_const_scorer(double score) {
  return [score](const InstructionRecord&) { return score; };
}

RecordScorer make_table_scorer(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw IoError("cannot open score table " + json_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(json_path + ": " + e.what());
  }

  if (j.is_object()) {
    auto table = std::make_shared<std::map<std::string, double>>();
    for (const auto& [key, value] : j.items()) {
      (*table)[key] = value.get<double>();
    }
    return [table, json_path](const InstructionRecord& rec) {
      auto it = table->find(rec.id);
      if (it == table->end()) {
        throw DegenerateInputError("score table " + json_path +
                                   " has no entry for record " + rec.id);
      }
      return it->second;
    };
  }
  if (j.is_array()) {
    auto scores = std::make_shared<std::vector<double>>();
    for (const auto& value : j) scores->push_back(value.get<double>());
    auto next = std::make_shared<std::size_t>(0);
    return [scores, next, json_path](const InstructionRecord&) {
      if (*next >= scores->size()) {
        throw DegenerateInputError("score table " + json_path +
                                   " ran out of entries");
      }
      return (*scores)[(*next)++];
    };
  }
  throw ParseError(json_path + ": score table must be an object or array");
}

void InstructionRecord::validate() const {
  if (conversations.size() < 2) {
    throw DegenerateInputError("record " + id + " has fewer than 2 turns");
  }
  if (conversations.size() % 2 != 0) {
    throw DegenerateInputError("record " + id +
                               " has an unanswered trailing turn");
  }
  for (std::size_t i = 0; i < conversations.size(); ++i) {
    const std::string& expected = i % 2 == 0 ? "human" : "assistant";
    if (conversations[i].role != expected) {
      throw DegenerateInputError("record " + id + " turn " +
                                 std::to_string(i) + " should be \"" +
                                 expected + "\", got \"" +
                                 conversations[i].role + "\"");
    }
  }
}

const std::string& InstructionRecord::first_assistant_text() const {
  for (const ConversationTurn& turn : conversations) {
    if (turn.role == "assistant") return turn.text;
  }
  throw DegenerateInputError("record " + id + " has no assistant turn");
}

GenerationResult generate(const std::vector<CatalogRecord>& records,
                          const std::string& task_name,
                          AssistantClient& assistant,
                          const TemplateSet& templates,
                          const SynonymTable& synonyms) {
  const bool pretrain = task_name == "pretrain";
  std::optional<TaskKind> task;
  if (!pretrain) {
    task = task_kind_from_name(task_name);
    if (!task.has_value()) {
      throw DegenerateInputError("unknown generation task \"" + task_name +
                                 "\"");
    }
  }
  const TaskTemplates& pool =
      pretrain ? templates.pretrain() : templates.for_task(*task);

  GenerationResult result;
  for (std::size_t ordinal = 0; ordinal < records.size(); ++ordinal) {
    const CatalogRecord& rec = records[ordinal];
    const std::string out_id = rec.id + "." + task_name;

    if (!pretrain && *task == TaskKind::kLocalization &&
        rec.cls != AttackClass::kBonafide && !rec.bbox.has_value()) {
      result.skipped.push_back(
          {out_id, "localization task needs a bbox annotation"});
      continue;
    }

    const std::string question =
        pool.questions[ordinal % pool.questions.size()];

    // Assistant brief: few-shot examples plus the gold class label, so the
    // backend describes the right content.
    std::string brief;
    for (const std::string& shot : pool.fewshot) brief += shot + "\n";
    brief += "Class label: " + synonyms.canonical(rec.cls) + ".\n" + question;

    std::string description;
    try {
      description = assistant.generate(
          {pool.system, brief, image_b64_or_empty(rec.image_path)});
    } catch (const TransportError& e) {
      throw TransportError("record " + out_id + ": " + e.what());
    }
    if (blank(description)) {
      result.skipped.push_back({out_id, "assistant returned empty text"});
      continue;
    }

    std::string answer;
    if (pretrain) {
      answer = description;
    } else {
      switch (*task) {
        case TaskKind::kCoarse: {
          const auto& answers =
              pool.answers.at(rec.cls == AttackClass::kBonafide ? "bonafide"
                                                                : "spoof");
          answer = answers[ordinal % answers.size()];
          break;
        }
        case TaskKind::kFine: {
          const auto& answers = pool.answers.at("any");
          answer = replace_all(answers[ordinal % answers.size()], "{class}",
                               synonyms.canonical(rec.cls));
          break;
        }
        case TaskKind::kReasoning: {
          const auto& answers = pool.answers.at("any");
          answer = replace_all(answers[ordinal % answers.size()],
                               "{description}", description);
          answer = replace_all(answer, "{verdict}",
                               rec.cls == AttackClass::kBonafide
                                   ? "real face"
                                   : "presentation attack");
          break;
        }
        case TaskKind::kLocalization: {
          if (rec.cls == AttackClass::kBonafide) {
            const auto& answers = pool.answers.at("bonafide");
            answer = answers[ordinal % answers.size()];
          } else {
            const auto& answers = pool.answers.at("attack");
            answer = replace_all(answers[ordinal % answers.size()],
                                 "{coordinates}",
                                 coordinates_string(*rec.bbox));
          }
          break;
        }
      }
    }

    InstructionRecord out;
    out.id = out_id;
    out.image_path = rec.image_path;
    out.task = task_name;
    out.conversations = {{"human", question}, {"assistant", answer}};
    out.validate();
    result.records.push_back(std::move(out));
  }
  return result;
}

std::string filter_report_to_json(const FilterReport& report) {
  nlohmann::ordered_json j;
  j["input_count"] = report.input_count;
  j["kept"] = report.kept;
  j["dropped_by_similarity"] = report.dropped_by_similarity;
  j["dropped_by_keyword"] = report.dropped_by_keyword;
  j["dropped_by_manual"] = report.dropped_by_manual;
  j["threshold"] = report.threshold;
  return j.dump();
}

std::pair<std::vector<InstructionRecord>, FilterReport> similarity_filter(
    const std::vector<InstructionRecord>& records, const RecordScorer& scorer,
    double threshold) {
  FilterReport report;
  report.input_count = static_cast<long>(records.size());
  report.threshold = threshold;

  std::vector<InstructionRecord> kept;
  for (const InstructionRecord& rec : records) {
    const double score = scorer(rec);
    if (!(score >= 0.0 && score <= 1.0)) {
      throw DegenerateInputError("scorer returned " + std::to_string(score) +
                                 " for record " + rec.id +
                                 ", expected [0, 1]");
    }
    if (score >= threshold) {
      kept.push_back(rec);
    } else {
      ++report.dropped_by_similarity;
    }
  }
  report.kept = static_cast<long>(kept.size());
  return {std::move(kept), report};
}

RequiredKeywordPolicy RequiredKeywordPolicy::from_catalog(
    const std::vector<CatalogRecord>& catalog, const SynonymTable& synonyms) {
  RequiredKeywordPolicy policy;
  policy.synonyms = &synonyms;
  for (const CatalogRecord& rec : catalog) {
    policy.gold_by_id[rec.id] = rec;
  }
  return policy;
}

std::pair<std::vector<InstructionRecord>, FilterReport> keyword_filter(
    const std::vector<InstructionRecord>& records,
    const std::vector<std::string>& banned,
    const RequiredKeywordPolicy& policy) {
  FilterReport report;
  report.input_count = static_cast<long>(records.size());

  auto satisfies_gold = [&](const InstructionRecord& rec) {
    if (policy.synonyms == nullptr || rec.task == "pretrain") return true;
    const auto gold_it = policy.gold_by_id.find(base_record_id(rec));
    if (gold_it == policy.gold_by_id.end()) return false;
    const CatalogRecord& gold = gold_it->second;
    const std::string& answer = rec.first_assistant_text();

    if (rec.task == "fine") {
      const std::vector<std::string> tokens = tokenize(answer);
      for (const std::string& phrase : policy.synonyms->phrases(gold.cls)) {
        if (contains_token_phrase(tokens, tokenize(phrase))) return true;
      }
      return false;
    }
    if (rec.task == "coarse" || rec.task == "reasoning") {
      const CoarseVerdict want = gold.cls == AttackClass::kBonafide
                                     ? CoarseVerdict::kBonafide
                                     : CoarseVerdict::kSpoof;
      return parse_coarse(answer) == want;
    }
    if (rec.task == "localization") {
      // Presence/absence of a coordinate group must match the gold
      // annotation; the canvas only matters for normalized boxes.
      const auto box = parse_box(answer, 1 << 20, 1 << 20);
      return gold.cls == AttackClass::kBonafide ? !box.has_value()
                                                : box.has_value();
    }
    return true;
  };

  std::vector<InstructionRecord> kept;
  for (const InstructionRecord& rec : records) {
    bool dropped = false;
    for (const ConversationTurn& turn : rec.conversations) {
      if (turn.role != "assistant") continue;
      const std::string lower = to_lower(turn.text);
      for (const std::string& phrase : banned) {
        if (!phrase.empty() &&
            lower.find(to_lower(phrase)) != std::string::npos) {
          dropped = true;
          break;
        }
      }
      if (dropped) break;
    }
    if (!dropped && !satisfies_gold(rec)) dropped = true;

    if (dropped) {
      ++report.dropped_by_keyword;
    } else {
      kept.push_back(rec);
    }
  }
  report.kept = static_cast<long>(kept.size());
  return {std::move(kept), report};
}

std::vector<std::string> load_banned_phrases(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw IoError("cannot open banned phrase list " + json_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(json_path + ": " + e.what());
  }
  std::vector<std::string> phrases;
  for (const auto& p : j) phrases.push_back(p.get<std::string>());
  return phrases;
}

std::pair<std::vector<InstructionRecord>, FilterReport> manual_filter(
    const std::vector<InstructionRecord>& records,
    const std::vector<std::string>& excluded_ids) {
  FilterReport report;
  report.input_count = static_cast<long>(records.size());

  std::vector<InstructionRecord> kept;
  for (const InstructionRecord& rec : records) {
    const bool excluded = std::find(excluded_ids.begin(), excluded_ids.end(),
                                    rec.id) != excluded_ids.end();
    if (excluded) {
      ++report.dropped_by_manual;
    } else {
      kept.push_back(rec);
    }
  }
  report.kept = static_cast<long>(kept.size());
  return {std::move(kept), report};
}

std::vector<std::string> load_exclusion_ids(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open exclusion list " + path);
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(
                                line.back())) != 0) {
      line.pop_back();
    }
    std::size_t start = 0;
    while (start < line.size() &&
           std::isspace(static_cast<unsigned char>(line[start])) != 0) {
      ++start;
    }
    if (start < line.size()) ids.push_back(line.substr(start));
  }
  return ids;
}

GenerationResult augment(const std::vector<InstructionRecord>& records,
                         AssistantClient& assistant, int n_variants) {
  if (n_variants < 0) {
    throw DegenerateInputError("n_variants must be >= 0");
  }
  GenerationResult result;
  for (const InstructionRecord& rec : records) {
    result.records.push_back(rec);
    const bool needs_image_token =
        rec.conversations.front().text.find("<image>") != std::string::npos;

    for (int k = 1; k <= n_variants; ++k) {
      const std::string variant_id = rec.id + "#" + std::to_string(k);
      AssistantRequest request;
      request.system =
          "Paraphrase the user's question. Keep the <image> token. Variant " +
          std::to_string(k);
      request.prompt = rec.conversations.front().text;

      std::string paraphrase;
      try {
        paraphrase = assistant.generate(request);
      } catch (const TransportError& e) {
        throw TransportError("record " + variant_id + ": " + e.what());
      }
      if (blank(paraphrase)) {
        result.skipped.push_back({variant_id, "paraphrase came back empty"});
        continue;
      }
      if (needs_image_token &&
          paraphrase.find("<image>") == std::string::npos) {
        result.skipped.push_back(
            {variant_id, "paraphrase lost the <image> placeholder"});
        continue;
      }

      InstructionRecord variant = rec;
      variant.id = variant_id;
      variant.conversations.front().text = paraphrase;
      result.records.push_back(std::move(variant));
    }
  }
  return result;
}

std::string corpus_manifest_to_json(const CorpusManifest& manifest) {
  nlohmann::ordered_json j;
  j["total"] = manifest.total;
  j["counts_by_task"] = manifest.counts_by_task;
  j["content_hash"] = manifest.content_hash;
  return j.dump();
}

CorpusManifest write_corpus(const std::vector<InstructionRecord>& records,
                            const std::string& path) {
  std::vector<InstructionRecord> sorted = records;
  std::sort(sorted.begin(), sorted.end(),
            [](const InstructionRecord& a, const InstructionRecord& b) {
              return a.id < b.id;
            });

  std::string content;
  CorpusManifest manifest;
  for (const InstructionRecord& rec : sorted) {
    rec.validate();
    content += record_to_json(rec).dump();
    content += "\n";
    ++manifest.counts_by_task[rec.task];
  }
  manifest.total = static_cast<long>(sorted.size());

  char hex[32];
  std::snprintf(hex, sizeof hex, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(content)));
  manifest.content_hash = hex;

  // Temp file + rename keeps readers from ever seeing a half-written
  // corpus.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << content;
    if (!out) throw IoError("write failure on " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " to " + path);
  return manifest;
}

std::vector<InstructionRecord> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus " + path);

  std::vector<InstructionRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    InstructionRecord rec;
    try {
      rec.id = j.at("id").get<std::string>();
      rec.image_path = j.at("image_path").get<std::string>();
      rec.task = j.at("task").get<std::string>();
      for (const auto& turn : j.at("conversations")) {
        rec.conversations.push_back({turn.at("role").get<std::string>(),
                                     turn.at("text").get<std::string>()});
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    rec.validate();
    records.push_back(std::move(rec));
  }
  return records;
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    std::uint32_t chunk = static_cast<std::uint32_t>(bytes[i]) << 16;
    if (i + 1 < bytes.size()) chunk |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
    if (i + 2 < bytes.size()) chunk |= bytes[i + 2];
    out.push_back(kAlphabet[(chunk >> 18) & 0x3F]);
    out.push_back(kAlphabet[(chunk >> 12) & 0x3F]);
    out.push_back(i + 1 < bytes.size() ? kAlphabet[(chunk >> 6) & 0x3F] : '=');
    out.push_back(i + 2 < bytes.size() ? kAlphabet[chunk & 0x3F] : '=');
  }
  return out;
}

}  // namespace fsk
