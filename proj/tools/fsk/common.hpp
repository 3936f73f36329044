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
#ifndef FSK_TOOLS_COMMON_HPP_
#define FSK_TOOLS_COMMON_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include <CLI11.hpp>

namespace fsk::cli {

// Resolved runtime configuration. Precedence: command-line flag, then
// config file (--config JSON), then environment variable, then default.
struct GlobalConfig {
  std::string config_path;
  bool verbose = false;

  std::optional<std::string> assistant_url_flag;
  std::optional<std::string> scorer_url_flag;
  std::optional<std::uint64_t> seed_flag;
  std::string data_dir_flag;

  std::optional<std::string> assistant_url() const;
  std::optional<std::string> scorer_url() const;
  std::uint64_t seed(std::uint64_t fallback = 0) const;
  std::string data_dir() const;

  void print_effective(std::ostream& out) const;
};

void add_global_options(CLI::App& app, GlobalConfig& cfg);

// Writes via a temp file + rename so partially written outputs are never
// observable.
void write_text_atomic(const std::string& path, const std::string& content);

// Default data directory (templates + synonyms). Compiled-in source-tree
// path, overridable with --data-dir.
std::string default_data_dir();

}  // namespace fsk::cli

#endif  // FSK_TOOLS_COMMON_HPP_
