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
#include "fsk/text.hpp"

#include <cctype>

namespace fsk {

namespace {

bool is_word_byte(unsigned char c) {
  // ASCII alphanumerics and anything above 0x7F (UTF-8 continuation or
  // lead bytes) count as word characters.
  return std::isalnum(c) != 0 || c >= 0x80;
}

}  // namespace

std::string to_lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (unsigned char c : text) {
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      if (!current.empty()) {
        tokens.push_back(current);
        current.clear();
      }
      if (std::isspace(c) == 0) {
        // Punctuation byte becomes its own token.
        tokens.push_back(std::string(1, static_cast<char>(c)));
      }
    }
  }
  if (!current.empty()) tokens.push_back(current);
  return tokens;
}

bool contains_token_phrase(const std::vector<std::string>& haystack,
                           const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    bool all = true;
    for (std::size_t j = 0; j < needle.size(); ++j) {
      if (haystack[i + j] != needle[j]) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

}  // namespace fsk
