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
#ifndef FSK_TESTS_FIXTURES_HPP_
#define FSK_TESTS_FIXTURES_HPP_

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "fsk/image.hpp"
#include "fsk/rng.hpp"

#ifndef FSK_DATA_DIR
#error "FSK_DATA_DIR must be defined by the build"
#endif

namespace fsk::testing {

inline std::string data_dir() { return FSK_DATA_DIR; }
inline std::string templates_dir() { return data_dir() + "/templates"; }
inline std::string synonyms_path() { return data_dir() + "/synonyms.json"; }

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& label) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("fsk-test-" + label + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

inline RasterImage random_image(int w, int h, std::uint64_t seed) {
  RasterImage img(w, h);
  SplitMix64 rng(seed);
  for (auto& b : img.pixels) {
    b = static_cast<std::uint8_t>(rng.next_below(256));
  }
  return img;
}

inline GrayImage random_gray(int w, int h, std::uint64_t seed,
                             int max_value = 255) {
  GrayImage img(w, h);
  SplitMix64 rng(seed);
  for (auto& b : img.pixels) {
    b = static_cast<std::uint8_t>(rng.next_below(max_value + 1));
  }
  return img;
}

inline std::vector<std::string> random_tokens(SplitMix64& rng, int min_len,
                                              int max_len) {
  static const std::vector<std::string> kVocab = {"the",  "cat",  "sat",
                                                  "mat",  "dog",  "ran",
                                                  "fast", "home", "blue"};
  const int len =
      min_len + static_cast<int>(rng.next_below(max_len - min_len + 1));
  std::vector<std::string> tokens;
  tokens.reserve(len);
  for (int i = 0; i < len; ++i) {
    tokens.push_back(kVocab[rng.next_below(kVocab.size())]);
  }
  return tokens;
}

}  // namespace fsk::testing

#endif  // FSK_TESTS_FIXTURES_HPP_
