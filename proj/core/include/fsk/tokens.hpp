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
#ifndef FSK_TOKENS_HPP_
#define FSK_TOKENS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fsk {

enum class TokenTag : std::uint8_t { kRgb, kSav, kPrompt };

// Dense N x D matrix of token embeddings, row-major, one row per token.
// Values must be finite; N >= 1 and D >= 1. `tags` is either empty or has
// one entry per row.
class TokenMatrix {
 public:
  TokenMatrix() = default;
  TokenMatrix(int n_tokens, int dim);
  TokenMatrix(int n_tokens, int dim, std::vector<double> values);

  int n_tokens() const { return n_; }
  int dim() const { return d_; }

  std::span<const double> row(int i) const {
    return {values_.data() + static_cast<std::size_t>(i) * d_,
            static_cast<std::size_t>(d_)};
  }
  std::span<double> row(int i) {
    return {values_.data() + static_cast<std::size_t>(i) * d_,
            static_cast<std::size_t>(d_)};
  }
  double at(int i, int j) const {
    return values_[static_cast<std::size_t>(i) * d_ + j];
  }
  double& at(int i, int j) {
    return values_[static_cast<std::size_t>(i) * d_ + j];
  }
  const std::vector<double>& values() const { return values_; }

  const std::vector<TokenTag>& tags() const { return tags_; }
  void set_tags(std::vector<TokenTag> tags);
  void set_uniform_tag(TokenTag tag);

  // Throws if any value is NaN or infinite.
  void check_finite() const;

  bool operator==(const TokenMatrix&) const = default;

 private:
  int n_ = 0;
  int d_ = 0;
  std::vector<double> values_;
  std::vector<TokenTag> tags_;
};

// Mean-pooled prompt embedding; `nonzero` records whether the pooled vector
// has a usable direction.
struct PooledPrompt {
  int dim = 0;
  std::vector<double> values;
  bool nonzero = false;
};

// TOKMAT container: ASCII header "TOKMAT N D\n" followed by N*D
// little-endian IEEE-754 binary32 values, row-major. Tags are not stored.
std::vector<std::uint8_t> write_tokmat(const TokenMatrix& m);
TokenMatrix read_tokmat(const std::vector<std::uint8_t>& bytes);
TokenMatrix load_tokmat(const std::string& path);
void save_tokmat(const std::string& path, const TokenMatrix& m);

}  // namespace fsk

#endif  // FSK_TOKENS_HPP_
