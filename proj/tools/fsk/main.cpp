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
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "common.hpp"
#include "fsk/error.hpp"

namespace {

// Lets global options (--seed, --data-dir, ...) appear after a subcommand
// name.
void enable_fallthrough(CLI::App* app) {
  app->fallthrough();
  for (CLI::App* sub : app->get_subcommands([](const CLI::App*) {
         return true;
       })) {
    enable_fallthrough(sub);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"faceshield toolkit: spoof-aware descriptors, prompt-guided "
               "token masking, FAS metrics, and instruction-dataset tooling"};
  app.require_subcommand(1);

  fsk::cli::GlobalConfig cfg;
  fsk::cli::add_global_options(app, cfg);

  fsk::cli::register_savp(app, cfg);
  fsk::cli::register_pvtm(app, cfg);
  fsk::cli::register_eval(app, cfg);
  fsk::cli::register_sweep(app, cfg);
  fsk::cli::register_dataset(app, cfg);
  fsk::cli::register_toy(app, cfg);
  enable_fallthrough(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const fsk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
