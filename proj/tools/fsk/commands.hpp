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
#ifndef FSK_TOOLS_COMMANDS_HPP_
#define FSK_TOOLS_COMMANDS_HPP_

#include "common.hpp"

namespace fsk::cli {

void register_savp(CLI::App& app, GlobalConfig& cfg);
void register_pvtm(CLI::App& app, GlobalConfig& cfg);
void register_eval(CLI::App& app, GlobalConfig& cfg);
void register_sweep(CLI::App& app, GlobalConfig& cfg);
void register_dataset(CLI::App& app, GlobalConfig& cfg);
void register_toy(CLI::App& app, GlobalConfig& cfg);

}  // namespace fsk::cli

#endif  // FSK_TOOLS_COMMANDS_HPP_
