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
#include "common.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "fsk/error.hpp"

#ifndef FSK_DEFAULT_DATA_DIR
#define FSK_DEFAULT_DATA_DIR "data"
#endif

namespace fsk::cli {

namespace {

std::optional<std::string> env_string(const char* name) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::string(value);
}

nlohmann::json load_config_file(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return j;
}

std::optional<std::string> config_string(const nlohmann::json& j,
                                         const char* section,
                                         const char* key) {
  if (j.contains(section) && j[section].contains(key)) {
    return j[section][key].get<std::string>();
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> GlobalConfig::assistant_url() const {
  if (assistant_url_flag.has_value()) return assistant_url_flag;
  if (const auto v = config_string(load_config_file(config_path), "assistant",
                                   "url")) {
    return v;
  }
  return env_string("FSK_ASSISTANT_URL");
}

std::optional<std::string> GlobalConfig::scorer_url() const {
  if (scorer_url_flag.has_value()) return scorer_url_flag;
  if (const auto v =
          config_string(load_config_file(config_path), "scorer", "url")) {
    return v;
  }
  return env_string("FSK_SCORER_URL");
}

std::uint64_t GlobalConfig::seed(std::uint64_t fallback) const {
  if (seed_flag.has_value()) return *seed_flag;
  const auto file = load_config_file(config_path);
  if (file.contains("seed")) return file["seed"].get<std::uint64_t>();
  if (const auto v = env_string("FSK_SEED")) {
    return std::strtoull(v->c_str(), nullptr, 10);
  }
  return fallback;
}

std::string GlobalConfig::data_dir() const {
  return data_dir_flag.empty() ? default_data_dir() : data_dir_flag;
}

void GlobalConfig::print_effective(std::ostream& out) const {
  out << "config:\n";
  out << "  seed: " << seed() << "\n";
  out << "  assistant.url: " << assistant_url().value_or("<unset>") << "\n";
  out << "  scorer.url: " << scorer_url().value_or("<unset>") << "\n";
  out << "  data dir: " << data_dir() << "\n";
}

void add_global_options(CLI::App& app, GlobalConfig& cfg) {
  app.add_option("--config", cfg.config_path, "JSON config file");
  app.add_flag("--verbose", cfg.verbose, "print the effective configuration");
  app.add_option_function<std::string>(
      "--assistant-url",
      [&cfg](const std::string& v) { cfg.assistant_url_flag = v; },
      "assistant endpoint (overrides config/FSK_ASSISTANT_URL)");
  app.add_option_function<std::string>(
      "--scorer-url",
      [&cfg](const std::string& v) { cfg.scorer_url_flag = v; },
      "similarity scorer endpoint (overrides config/FSK_SCORER_URL)");
  app.add_option_function<std::uint64_t>(
      "--seed", [&cfg](std::uint64_t v) { cfg.seed_flag = v; },
      "global seed (overrides config/FSK_SEED)");
  app.add_option("--data-dir", cfg.data_dir_flag,
                 "directory holding templates/ and synonyms.json");
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << content;
    if (!out) throw IoError("write failure on " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " into place at " + path);
}

std::string default_data_dir() { return FSK_DEFAULT_DATA_DIR; }

}  // namespace fsk::cli
