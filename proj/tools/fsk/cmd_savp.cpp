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
#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "commands.hpp"
#include "fsk/error.hpp"
#include "fsk/image.hpp"
#include "fsk/savp.hpp"

namespace fsk::cli {

namespace {

namespace fs = std::filesystem;

struct SavpOptions {
  std::string in_dir;
  std::string out_dir;
  int jobs = 1;
  HogConfig hog;
};

void save_plane_atomic(const fs::path& path, const GrayImage& plane) {
  const auto bytes = write_pgm(plane);
  const fs::path tmp = path.string() + ".tmp";
  write_file_bytes(tmp.string(), bytes);
  fs::rename(tmp, path);
}

int run_savp(const SavpOptions& opt) {
  if (!fs::is_directory(opt.in_dir)) {
    throw IoError("input directory " + opt.in_dir + " does not exist");
  }
  fs::create_directories(opt.out_dir);

  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(opt.in_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ppm") {
      inputs.push_back(entry.path());
    }
  }
  std::sort(inputs.begin(), inputs.end());

  std::atomic<std::size_t> cursor{0};
  std::atomic<int> failures{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= inputs.size()) return;
      const fs::path& input = inputs[i];
      try {
        const RasterImage img = load_ppm(input.string());
        const DescriptorImage desc = compose_savp(img, opt.hog);
        const std::string stem = input.stem().string();
        const fs::path base = fs::path(opt.out_dir) / stem;
        save_plane_atomic(base.string() + ".lbp.pgm",
                          GrayImage(desc.width, desc.height, desc.lbp));
        save_plane_atomic(base.string() + ".gray.pgm",
                          GrayImage(desc.width, desc.height, desc.gray));
        save_plane_atomic(base.string() + ".hog.pgm",
                          GrayImage(desc.width, desc.height, desc.hog));
      } catch (const std::exception& e) {
        ++failures;
        const std::lock_guard<std::mutex> lock(log_mutex);
        std::cerr << "failed: " << input.string() << ": " << e.what() << "\n";
      }
    }
  };

  const int jobs = std::max(1, opt.jobs);
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const int failed = failures.load();
  std::cout << (inputs.size() - failed) << " processed, " << failed
            << " failed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

void register_savp(CLI::App& app, GlobalConfig& cfg) {
  auto opt = std::make_shared<SavpOptions>();
  CLI::App* cmd = app.add_subcommand(
      "savp", "compute (lbp, gray, hog) descriptor planes for a directory of "
              "PPM images");
  cmd->add_option("--in", opt->in_dir, "input directory of .ppm files")
      ->required();
  cmd->add_option("--out", opt->out_dir, "output directory for .pgm planes")
      ->required();
  cmd->add_option("--jobs", opt->jobs, "worker threads")->default_val(1);
  cmd->add_option("--cell-size", opt->hog.cell_size, "HOG cell size in px")
      ->default_val(8);
  cmd->add_option("--bins", opt->hog.bins, "HOG orientation bins")
      ->default_val(9);
  cmd->add_option("--block-size", opt->hog.block_size, "HOG block size in "
                  "cells")
      ->default_val(2);
  cmd->add_option("--block-stride", opt->hog.block_stride,
                  "HOG block stride in cells")
      ->default_val(1);
  cmd->add_option("--norm-clip", opt->hog.norm_clip, "L2-Hys clip value")
      ->default_val(0.2);

  cmd->callback([opt, &cfg] {
    if (cfg.verbose) cfg.print_effective(std::cerr);
    if (run_savp(*opt) != 0) throw CLI::RuntimeError(1);
  });
}

}  // namespace fsk::cli
