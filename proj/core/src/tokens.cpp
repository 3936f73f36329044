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
#include "fsk/tokens.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

#include "fsk/error.hpp"
#include "fsk/image.hpp"

namespace fsk {

namespace {

constexpr std::int64_t kMaxElements = std::int64_t{1} << 28;

void check_shape(int n, int d) {
  if (n < 1 || d < 1) {
    throw SizeError("token matrix needs N >= 1 and D >= 1, got " +
                    std::to_string(n) + "x" + std::to_string(d));
  }
  if (static_cast<std::int64_t>(n) * d > kMaxElements) {
    throw SizeError("token matrix unreasonably large: " + std::to_string(n) +
                    "x" + std::to_string(d));
  }
}

}  // namespace

TokenMatrix::TokenMatrix(int n_tokens, int dim) : n_(n_tokens), d_(dim) {
  check_shape(n_, d_);
  values_.assign(static_cast<std::size_t>(n_) * d_, 0.0);
}

TokenMatrix::TokenMatrix(int n_tokens, int dim, std::vector<double> values)
    : n_(n_tokens), d_(dim), values_(std::move(values)) {
  check_shape(n_, d_);
  if (values_.size() != static_cast<std::size_t>(n_) * d_) {
    throw SizeError("token value buffer size " +
                    std::to_string(values_.size()) + " does not match " +
                    std::to_string(n_) + "x" + std::to_string(d_));
  }
  check_finite();
}

void TokenMatrix::set_tags(std::vector<TokenTag> tags) {
  if (!tags.empty() && tags.size() != static_cast<std::size_t>(n_)) {
    throw SizeError("tag count " + std::to_string(tags.size()) +
                    " does not match token count " + std::to_string(n_));
  }
  tags_ = std::move(tags);
}

void TokenMatrix::set_uniform_tag(TokenTag tag) {
  tags_.assign(static_cast<std::size_t>(n_), tag);
}

void TokenMatrix::check_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw DegenerateInputError("token matrix contains NaN or Inf");
    }
  }
}

std::vector<std::uint8_t> write_tokmat(const TokenMatrix& m) {
  char header[48];
  const int n = std::snprintf(header, sizeof header, "TOKMAT %d %d\n",
                              m.n_tokens(), m.dim());
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(n) + m.values().size() * 4);
  out.insert(out.end(), header, header + n);
  for (double v : m.values()) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    out.push_back(static_cast<std::uint8_t>(bits & 0xFF));
    out.push_back(static_cast<std::uint8_t>((bits >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((bits >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((bits >> 24) & 0xFF));
  }
  return out;
}

TokenMatrix read_tokmat(const std::vector<std::uint8_t>& bytes) {
  static constexpr char kMagic[] = "TOKMAT ";
  if (bytes.size() < 7 || std::memcmp(bytes.data(), kMagic, 7) != 0) {
    throw ParseError("bad TOKMAT magic", 0);
  }
  std::size_t pos = 7;
  auto read_int = [&](const char* field) {
    if (pos >= bytes.size() || bytes[pos] < '0' || bytes[pos] > '9') {
      throw ParseError(std::string("expected digit for ") + field, pos);
    }
    long value = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      value = value * 10 + (bytes[pos] - '0');
      if (value > std::numeric_limits<int>::max()) {
        throw ParseError(std::string(field) + " overflows", pos);
      }
      ++pos;
    }
    return static_cast<int>(value);
  };

  const int n = read_int("N");
  if (pos >= bytes.size() || bytes[pos] != ' ') {
    throw ParseError("expected single space between N and D", pos);
  }
  ++pos;
  const int d = read_int("D");
  if (pos >= bytes.size() || bytes[pos] != '\n') {
    throw ParseError("expected newline after TOKMAT header", pos);
  }
  ++pos;
  check_shape(n, d);

  const std::size_t need = static_cast<std::size_t>(n) * d * 4;
  if (bytes.size() - pos < need) {
    throw ParseError("truncated TOKMAT payload: need " + std::to_string(need) +
                         " bytes, have " + std::to_string(bytes.size() - pos),
                     bytes.size());
  }
  if (bytes.size() - pos > need) {
    throw ParseError("trailing bytes after TOKMAT payload", pos + need);
  }

  std::vector<double> values(static_cast<std::size_t>(n) * d);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t o = pos + i * 4;
    const std::uint32_t bits =
        static_cast<std::uint32_t>(bytes[o]) |
        (static_cast<std::uint32_t>(bytes[o + 1]) << 8) |
        (static_cast<std::uint32_t>(bytes[o + 2]) << 16) |
        (static_cast<std::uint32_t>(bytes[o + 3]) << 24);
    const float f = std::bit_cast<float>(bits);
    if (!std::isfinite(f)) {
      throw ParseError("non-finite value in TOKMAT payload", o);
    }
    values[i] = static_cast<double>(f);
  }
  return TokenMatrix(n, d, std::move(values));
}

TokenMatrix load_tokmat(const std::string& path) {
  try {
    return read_tokmat(read_file_bytes(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_tokmat(const std::string& path, const TokenMatrix& m) {
  write_file_bytes(path, write_tokmat(m));
}

}  // namespace fsk
