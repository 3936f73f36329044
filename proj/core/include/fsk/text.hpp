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
#ifndef FSK_TEXT_HPP_
#define FSK_TEXT_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace fsk {

// The one tokenizer shared by prompt embedding, text metrics, and response
// parsing. Lowercases, splits on whitespace, and emits every ASCII
// punctuation character as its own token ("Is this real?" -> is, this,
// real, ?). Non-ASCII bytes are treated as word characters so UTF-8
// sequences stay intact.
std::vector<std::string> tokenize(std::string_view text);

// Lowercase copy (ASCII only).
std::string to_lower(std::string_view text);

// True if `needle` occurs in `haystack` as a run of consecutive tokens.
bool contains_token_phrase(const std::vector<std::string>& haystack,
                           const std::vector<std::string>& needle);

}  // namespace fsk

#endif  // FSK_TEXT_HPP_
