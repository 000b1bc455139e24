// Copyright (c) 2026, The dscomp Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Run configuration for the end-to-end pipeline.
//
// The file format is line based:
//
//   # comment
//   [select]
//   metric = el2n
//   ipc = 10
//
// Sections are [dataset] [score] [select] [combine] [augment] [eval].
// Unknown sections and keys are errors.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "dscomp/augment.hpp"
#include "dscomp/combiner.hpp"
#include "dscomp/model.hpp"
#include "dscomp/pruner.hpp"

namespace dscomp {

/// Hard-label evaluation settings. Only plain_sgd is executable.
struct EvalConfig {
  int epochs = 300;
  int batch_size = 32;
  double learning_rate = 0.05;
  std::string optimizer = "plain_sgd";
  std::uint64_t seed = 0;
  int hidden_dim = 64;
  PipelineConfig pipeline = PipelineConfig::crop_flip(32);

  void validate() const;
  TrainConfig train_config() const;

  static EvalConfig standard_desk(int out_side = 32);
};

/// Description of a published evaluation setting. Informational only: the
/// toy model cannot run it.
struct EvalPresetRecord {
  std::string name;
  int epochs = 0;
  int batch_size = 0;
  double learning_rate = 0.0;
  std::string optimizer;
  bool executable = false;
};

/// "standard-desk" and "standard-imagenet".
const EvalPresetRecord& eval_preset_record(std::string_view name);
/// Executable presets only; informational presets throw InvalidArgument.
EvalConfig eval_preset(std::string_view name, int out_side = 32);

struct RunConfig {
  struct Dataset {
    int classes = 10;
    int train_per_class = 200;
    int test_per_class = 100;
    int side = 32;
    std::uint64_t seed = 1;
    /// When set, train/ and test/ are loaded from here instead of generated.
    std::filesystem::path dir;
  } dataset;

  struct Score {
    TrainConfig train;
    /// Optional precomputed score table.
    std::filesystem::path file;
  } score;

  struct Select {
    /// Off selects a random balanced subset.
    bool enabled = true;
    Metric metric = Metric::el2n;
    Direction direction = Direction::easy;
    bool balanced = true;
    bool random_tie_break = false;
    /// Images per class in the final dataset. 2 of 200 is 99% pruning.
    int ipc = 2;
    std::uint64_t seed = 0;
  } select;

  struct Combine {
    bool enabled = true;
    int k = 2;
    /// 0 means dataset side / k.
    int cell_side = 0;
  } combine;

  PipelineConfig augment = PipelineConfig::pca_default(2, 32);
  EvalConfig eval;

  void validate() const;
  GridSpec grid() const;
  /// Samples drawn per class: ipc, times k^2 when combining.
  int sources_per_class() const;
  /// Reseeds selection, scoring and evaluation; the dataset seed is kept.
  RunConfig with_root_seed(std::uint64_t seed) const;
};

RunConfig parse_run_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);
/// Canonical text; parse_run_config(render_run_config(c)) == c.
std::string render_run_config(const RunConfig& config);
/// 16 hex digits over the canonical text.
std::string config_hash(const RunConfig& config);

}  // namespace dscomp
