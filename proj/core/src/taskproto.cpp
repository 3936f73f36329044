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
#include "fsk/taskproto.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fsk/error.hpp"
#include "fsk/rng.hpp"
#include "fsk/text.hpp"

namespace fsk {

namespace {

const std::vector<std::string> kClassNames = {
    "Bonafide",     "Fakehead",  "Print",      "Glasses",
    "Replay",       "PaperMask", "FlexibleMask", "RigidMask",
    "PartialEye",   "PartialMouth", "Makeup",  "Tattoo",
};

const std::vector<std::string> kTaskNames = {"coarse", "fine", "reasoning",
                                             "localization"};

const std::vector<std::string> kSourceNames = {"W", "S", "P"};

std::string squash_spaces(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == ' ' || c == '-' || c == '_') continue;
    out.push_back(c);
  }
  return out;
}

struct CueMatch {
  std::size_t start = 0;
  std::size_t length = 0;
  bool bonafide = false;
};

const std::vector<std::vector<std::string>>& bonafide_cues() {
  static const std::vector<std::vector<std::string>> cues = {
      {"real"}, {"bonafide"}, {"genuine"}, {"live"}};
  return cues;
}

const std::vector<std::vector<std::string>>& spoof_cues() {
  static const std::vector<std::vector<std::string>> cues = {
      {"spoof"}, {"attack"}, {"fake"}, {"presentation", "attack"}};
  return cues;
}

bool negated(const std::vector<std::string>& tokens, std::size_t cue_start) {
  static const std::set<std::string> kNegations = {"not", "no", "never",
                                                   "without"};
  const std::size_t window_begin = cue_start >= 3 ? cue_start - 3 : 0;
  for (std::size_t i = window_begin; i < cue_start; ++i) {
    if (kNegations.count(tokens[i]) > 0) return true;
  }
  return false;
}

std::vector<std::size_t> find_phrase(const std::vector<std::string>& tokens,
                                     const std::vector<std::string>& phrase) {
  std::vector<std::size_t> starts;
  if (phrase.empty() || phrase.size() > tokens.size()) return starts;
  for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
    bool all = true;
    for (std::size_t j = 0; j < phrase.size(); ++j) {
      if (tokens[i + j] != phrase[j]) {
        all = false;
        break;
      }
    }
    if (all) starts.push_back(i);
  }
  return starts;
}

nlohmann::json parse_json_line(const std::string& line,
                               const std::string& path, std::size_t lineno) {
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
  }
}

std::optional<BBox> bbox_from_json(const nlohmann::json& j,
                                   const std::string& where) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_array() || j.size() != 4) {
    throw ParseError(where + ": bbox must be [x1, y1, x2, y2] or null");
  }
  try {
    return BBox(j[0].get<int>(), j[1].get<int>(), j[2].get<int>(),
                j[3].get<int>());
  } catch (const BoundsError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

}  // namespace

const std::string& attack_class_name(AttackClass cls) {
  return kClassNames[static_cast<std::size_t>(cls)];
}

std::optional<AttackClass> attack_class_from_name(const std::string& name) {
  const std::string needle = squash_spaces(to_lower(name));
  for (std::size_t i = 0; i < kClassNames.size(); ++i) {
    if (squash_spaces(to_lower(kClassNames[i])) == needle) {
      return static_cast<AttackClass>(i);
    }
  }
  return std::nullopt;
}

std::vector<AttackClass> all_attack_classes() {
  std::vector<AttackClass> out;
  out.reserve(kAttackClassCount);
  for (int i = 0; i < kAttackClassCount; ++i) {
    out.push_back(static_cast<AttackClass>(i));
  }
  return out;
}

const std::string& task_kind_name(TaskKind task) {
  return kTaskNames[static_cast<std::size_t>(task)];
}

std::optional<TaskKind> task_kind_from_name(const std::string& name) {
  const std::string needle = to_lower(name);
  for (std::size_t i = 0; i < kTaskNames.size(); ++i) {
    if (kTaskNames[i] == needle) return static_cast<TaskKind>(i);
  }
  return std::nullopt;
}

const std::string& source_name(Source s) {
  return kSourceNames[static_cast<std::size_t>(s)];
}

std::optional<Source> source_from_name(const std::string& name) {
  for (std::size_t i = 0; i < kSourceNames.size(); ++i) {
    if (kSourceNames[i] == name) return static_cast<Source>(i);
  }
  return std::nullopt;
}

SynonymTable SynonymTable::load(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw IoError("cannot open synonym table " + json_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(json_path + ": " + e.what());
  }

  SynonymTable table;
  for (AttackClass cls : all_attack_classes()) {
    const std::string& name = attack_class_name(cls);
    if (!j.contains(name) || !j[name].is_array() || j[name].empty()) {
      throw ParseError(json_path + ": missing synonym list for " + name);
    }
    std::vector<std::string> phrases;
    for (const auto& entry : j[name]) {
      phrases.push_back(to_lower(entry.get<std::string>()));
    }
    table.phrases_[cls] = std::move(phrases);
  }
  return table;
}

const std::vector<std::string>& SynonymTable::phrases(AttackClass cls) const {
  return phrases_.at(cls);
}

const std::string& SynonymTable::canonical(AttackClass cls) const {
  return phrases_.at(cls).front();
}

CoarseVerdict parse_coarse(const std::string& raw) {
  const std::vector<std::string> tokens = tokenize(raw);
  int bonafide_evidence = 0;
  int spoof_evidence = 0;

  auto scan = [&](const std::vector<std::vector<std::string>>& cues,
                  bool cue_is_bonafide) {
    for (const auto& cue : cues) {
      for (std::size_t start : find_phrase(tokens, cue)) {
        const bool flipped = negated(tokens, start);
        const bool counts_bonafide = cue_is_bonafide != flipped;
        (counts_bonafide ? bonafide_evidence : spoof_evidence) += 1;
      }
    }
  };
  scan(bonafide_cues(), true);
  scan(spoof_cues(), false);

  if (bonafide_evidence > 0 && spoof_evidence == 0) {
    return CoarseVerdict::kBonafide;
  }
  if (spoof_evidence > 0 && bonafide_evidence == 0) {
    return CoarseVerdict::kSpoof;
  }
  return CoarseVerdict::kUnparseable;
}

std::optional<AttackClass> parse_fine(const std::string& raw,
                                      const SynonymTable& table) {
  const std::vector<std::string> tokens = tokenize(raw);

  struct Match {
    std::size_t start;
    std::size_t length;
    AttackClass cls;
  };
  std::vector<Match> matches;
  for (AttackClass cls : all_attack_classes()) {
    for (const std::string& phrase : table.phrases(cls)) {
      const std::vector<std::string> phrase_tokens = tokenize(phrase);
      for (std::size_t start : find_phrase(tokens, phrase_tokens)) {
        matches.push_back({start, phrase_tokens.size(), cls});
      }
    }
  }

  // Longest match wins: drop any match strictly contained in a longer
  // overlapping one ("paper mask" suppresses a bare "mask" synonym).
  std::set<AttackClass> families;
  for (const Match& m : matches) {
    bool suppressed = false;
    for (const Match& other : matches) {
      if (other.length > m.length && other.start < m.start + m.length &&
          m.start < other.start + other.length) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) families.insert(m.cls);
  }

  if (families.size() == 1) return *families.begin();
  return std::nullopt;
}

std::optional<BBox> parse_box(const std::string& raw, int img_w, int img_h) {
  if (img_w < 1 || img_h < 1) {
    throw SizeError("parse_box needs positive image dimensions");
  }

  auto try_group = [&](std::size_t open) -> std::optional<std::array<double, 4>> {
    std::size_t pos = open + 1;
    std::array<double, 4> nums{};
    for (int k = 0; k < 4; ++k) {
      while (pos < raw.size() &&
             (raw[pos] == ' ' || raw[pos] == ',' || raw[pos] == '\t')) {
        ++pos;
      }
      std::size_t end = pos;
      while (end < raw.size() &&
             (std::isdigit(static_cast<unsigned char>(raw[end])) != 0 ||
              raw[end] == '.' || raw[end] == '-' || raw[end] == '+')) {
        ++end;
      }
      if (end == pos) return std::nullopt;
      try {
        nums[k] = std::stod(raw.substr(pos, end - pos));
      } catch (const std::exception&) {
        return std::nullopt;
      }
      pos = end;
    }
    while (pos < raw.size() && (raw[pos] == ' ' || raw[pos] == '\t')) ++pos;
    if (pos >= raw.size() || raw[pos] != ']') return std::nullopt;
    return nums;
  };

  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '[') continue;
    const auto group = try_group(i);
    if (!group.has_value()) continue;

    std::array<double, 4> v = *group;
    const bool normalized =
        v[0] <= 1.0 && v[1] <= 1.0 && v[2] <= 1.0 && v[3] <= 1.0;
    if (normalized) {
      v[0] *= img_w;
      v[1] *= img_h;
      v[2] *= img_w;
      v[3] *= img_h;
    }
    const int x1 = std::clamp(static_cast<int>(std::floor(v[0] + 0.5)), 0, img_w);
    const int y1 = std::clamp(static_cast<int>(std::floor(v[1] + 0.5)), 0, img_h);
    const int x2 = std::clamp(static_cast<int>(std::floor(v[2] + 0.5)), 0, img_w);
    const int y2 = std::clamp(static_cast<int>(std::floor(v[3] + 0.5)), 0, img_h);
    if (x1 >= x2 || y1 >= y2) return std::nullopt;
    return BBox(x1, y1, x2, y2);
  }
  return std::nullopt;
}

std::vector<CatalogRecord> load_catalog(const std::string& jsonl_path) {
  std::ifstream in(jsonl_path);
  if (!in) throw IoError("cannot open catalog " + jsonl_path);

  std::vector<CatalogRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const nlohmann::json j = parse_json_line(line, jsonl_path, lineno);
    const std::string where = jsonl_path + ":" + std::to_string(lineno);

    CatalogRecord rec;
    try {
      rec.id = j.at("id").get<std::string>();
      rec.image_path = j.at("image_path").get<std::string>();
      const auto source = source_from_name(j.at("source").get<std::string>());
      if (!source.has_value()) {
        throw ParseError(where + ": unknown source tag \"" +
                         j.at("source").get<std::string>() + "\"");
      }
      rec.source = *source;
      const auto cls =
          attack_class_from_name(j.at("class").get<std::string>());
      if (!cls.has_value()) {
        throw ParseError(where + ": unknown class \"" +
                         j.at("class").get<std::string>() + "\"");
      }
      rec.cls = *cls;
      if (j.contains("bbox")) rec.bbox = bbox_from_json(j["bbox"], where);
      if (j.contains("reference") && !j["reference"].is_null()) {
        rec.reference = j["reference"].get<std::string>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void save_catalog(const std::string& jsonl_path,
                  const std::vector<CatalogRecord>& records) {
  std::ofstream out(jsonl_path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + jsonl_path + " for writing");
  for (const CatalogRecord& rec : records) {
    nlohmann::ordered_json j;
    j["id"] = rec.id;
    j["image_path"] = rec.image_path;
    j["source"] = source_name(rec.source);
    j["class"] = attack_class_name(rec.cls);
    if (rec.bbox.has_value()) {
      j["bbox"] = {rec.bbox->x1, rec.bbox->y1, rec.bbox->x2, rec.bbox->y2};
    } else {
      j["bbox"] = nullptr;
    }
    if (rec.reference.has_value()) j["reference"] = *rec.reference;
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("write failure on " + jsonl_path);
}

std::vector<PredictionRecord> load_predictions(const std::string& jsonl_path) {
  std::ifstream in(jsonl_path);
  if (!in) throw IoError("cannot open predictions " + jsonl_path);

  std::vector<PredictionRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const nlohmann::json j = parse_json_line(line, jsonl_path, lineno);
    const std::string where = jsonl_path + ":" + std::to_string(lineno);

    PredictionRecord rec;
    try {
      rec.id = j.at("id").get<std::string>();
      const auto task = task_kind_from_name(j.at("task").get<std::string>());
      if (!task.has_value()) {
        throw ParseError(where + ": unknown task \"" +
                         j.at("task").get<std::string>() + "\"");
      }
      rec.task = *task;
      rec.raw_text = j.at("raw_text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void save_predictions(const std::string& jsonl_path,
                      const std::vector<PredictionRecord>& records) {
  std::ofstream out(jsonl_path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + jsonl_path + " for writing");
  for (const PredictionRecord& rec : records) {
    nlohmann::ordered_json j;
    j["id"] = rec.id;
    j["task"] = task_kind_name(rec.task);
    j["raw_text"] = rec.raw_text;
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("write failure on " + jsonl_path);
}

void ProtocolSpec::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DegenerateInputError("test_fraction must lie in (0, 1)");
  }
  if (mode == ProtocolMode::kCross) {
    if (train_sources.empty() || !test_source.has_value()) {
      throw DegenerateInputError(
          "cross protocol needs train sources and a test source");
    }
    for (Source s : train_sources) {
      if (s == *test_source) {
        throw DegenerateInputError(
            "cross protocol: test source must not appear in train sources");
      }
    }
  }
}

SplitResult make_splits(const std::vector<CatalogRecord>& catalog,
                        const ProtocolSpec& spec) {
  spec.validate();

  // Per-source shuffle of catalog positions; the tail of the shuffle is
  // that source's test subset.
  std::map<Source, std::vector<std::size_t>> by_source;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    by_source[catalog[i].source].push_back(i);
  }

  std::vector<bool> in_test(catalog.size(), false);
  for (auto& [source, indices] : by_source) {
    SplitMix64 rng(spec.split_seed ^ fnv1a64(source_name(source)));
    for (std::size_t i = indices.size(); i > 1; --i) {
      const std::size_t j = rng.next_below(i);
      std::swap(indices[i - 1], indices[j]);
    }
    const std::size_t n_test = static_cast<std::size_t>(
        std::floor(spec.test_fraction * static_cast<double>(indices.size())));
    for (std::size_t k = indices.size() - n_test; k < indices.size(); ++k) {
      in_test[indices[k]] = true;
    }
  }

  SplitResult result;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const CatalogRecord& rec = catalog[i];
    if (spec.mode == ProtocolMode::kIntra) {
      (in_test[i] ? result.test_ids : result.train_ids).push_back(rec.id);
    } else {
      const bool in_train_sources =
          std::find(spec.train_sources.begin(), spec.train_sources.end(),
                    rec.source) != spec.train_sources.end();
      if (in_train_sources) {
        result.train_ids.push_back(rec.id);
      } else if (rec.source == *spec.test_source && in_test[i]) {
        result.test_ids.push_back(rec.id);
      }
    }
  }
  return result;
}

TemplateSet TemplateSet::load_dir(const std::string& dir) {
  static const std::vector<std::string> kFiles = {
      "coarse", "fine", "reasoning", "localization", "pretrain"};

  TemplateSet set;
  for (const std::string& name : kFiles) {
    const std::string path = dir + "/" + name + ".json";
    std::ifstream in(path);
    if (!in) throw IoError("cannot open template file " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path + ": " + e.what());
    }

    TaskTemplates t;
    t.system = j.value("system", std::string{});
    if (j.contains("fewshot")) {
      for (const auto& f : j.at("fewshot")) {
        t.fewshot.push_back(f.get<std::string>());
      }
    }
    for (const auto& q : j.at("questions")) {
      t.questions.push_back(q.get<std::string>());
    }
    if (j.contains("answers")) {
      for (const auto& [key, pool] : j.at("answers").items()) {
        for (const auto& a : pool) {
          t.answers[key].push_back(a.get<std::string>());
        }
      }
    }
    if (t.questions.empty()) {
      throw ParseError(path + ": empty question pool");
    }

    // Placeholder contract lint.
    for (const std::string& q : t.questions) {
      if (q.find("<image>") == std::string::npos) {
        throw ParseError(path + ": question lacks <image> token: " + q);
      }
    }
    auto require_placeholder = [&](const std::string& pool_key,
                                   const std::string& placeholder) {
      auto it = t.answers.find(pool_key);
      if (it == t.answers.end() || it->second.empty()) {
        throw ParseError(path + ": missing answer pool \"" + pool_key + "\"");
      }
      for (const std::string& a : it->second) {
        if (a.find(placeholder) == std::string::npos) {
          throw ParseError(path + ": answer lacks " + placeholder + ": " + a);
        }
      }
    };
    if (name == "localization") {
      require_placeholder("attack", "{coordinates}");
      require_placeholder("bonafide", "");
    } else if (name == "fine") {
      require_placeholder("any", "{class}");
    } else if (name == "reasoning") {
      require_placeholder("any", "{verdict}");
    } else if (name == "coarse") {
      require_placeholder("bonafide", "");
      require_placeholder("spoof", "");
    }

    set.by_name_[name] = std::move(t);
  }
  return set;
}

const TaskTemplates& TemplateSet::for_task(TaskKind task) const {
  return by_name_.at(task_kind_name(task));
}

const TaskTemplates& TemplateSet::pretrain() const {
  return by_name_.at("pretrain");
}

std::string render_prompt(TaskKind task, const TemplateSet& templates,
                          std::size_t ordinal) {
  const TaskTemplates& pool = templates.for_task(task);
  return pool.questions[ordinal % pool.questions.size()];
}

}  // namespace fsk
