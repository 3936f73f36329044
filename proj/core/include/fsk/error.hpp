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
#ifndef FSK_ERROR_HPP_
#define FSK_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fsk {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input bytes (PPM/PGM/TOKMAT/JSON). Carries the byte offset at
// which decoding failed when it is known, SIZE_MAX otherwise.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset = SIZE_MAX)
      : Error(byte_offset == SIZE_MAX
                  ? what
                  : what + " (at byte " + std::to_string(byte_offset) + ")"),
        offset_(byte_offset) {}

  std::size_t byte_offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// A coordinate or index fell outside its container.
class BoundsError : public Error {
 public:
  using Error::Error;
};

// An image or matrix is too small / mis-shaped for the requested operation.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Matrix/vector dimensions do not agree.
class DimMismatchError : public Error {
 public:
  using Error::Error;
};

// Input is numerically degenerate for the operation (e.g. zero-norm vector
// where a direction is required).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Filesystem / transport failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fsk

#endif  // FSK_ERROR_HPP_
