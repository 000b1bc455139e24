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

// End-to-end runs: score -> select -> combine -> evaluate, the ablation
// ladder, and the experiment tables.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dscomp/combiner.hpp"
#include "dscomp/dataset.hpp"
#include "dscomp/dynamics.hpp"
#include "dscomp/entropy_lab.hpp"
#include "dscomp/pruner.hpp"
#include "dscomp/run_config.hpp"

namespace dscomp {

struct StageCost {
  std::string stage;
  double seconds = 0.0;
  std::uintmax_t bytes = 0;
};

struct RunReport {
  std::string label;
  std::string config_hash;
  std::string provenance;
  /// Top-1 on the test split; 0 when training diverged.
  double accuracy = 0.0;
  bool diverged = false;
  /// 1-based epoch of the first non-finite loss.
  int divergence_epoch = 0;
  std::size_t train_images = 0;
  std::vector<StageCost> stages;
  double total_seconds = 0.0;
  std::optional<StorageReport> storage;
};

/// Trains a fresh toy model on `train` with hard labels and the configured
/// pipeline, then scores top-1 on `test`. Each sample's augmentation stream
/// depends only on (seed, epoch, sample_id).
RunReport evaluate_hard_label(const DatasetView& train, const DatasetView& test,
                              const EvalConfig& config);

/// Stream used to augment `sample_id` in `epoch`.
RandomStream augment_stream(std::uint64_t seed, int epoch, SampleId sample_id);

/// Builds the train/test split a run config describes.
DeskSplit load_split(const RunConfig& config);

/// Scores every training sample with the config's score settings.
ScoreTable score_dataset(const DatasetView& train, const TrainConfig& config);

struct PcaResult {
  CompressedDataset compressed;
  SubsetIndices subset;
  RunReport report;
};

struct PcaOptions {
  /// Reused instead of the score stage when set.
  const ScoreTable* scores = nullptr;
  /// Artifacts (scores, subset, compressed dataset) go here when set.
  std::optional<std::filesystem::path> output_dir;
  std::string label = "pca";
};

PcaResult run_pca(const DeskSplit& split, const RunConfig& config,
                  const PcaOptions& options = {});

/// Standardizes every selected sample on its own (no grid).
CompressedDataset build_single_dataset(const DatasetView& dataset, const SubsetIndices& subset,
                                       int side, Interpolation mode);

inline constexpr std::string_view kLadderRungs[] = {"random", "+prune", "+combine", "+augment"};

/// One rung of the ablation ladder derived from `base`. The last rung uses
/// `patch` as its patch stage.
RunConfig ladder_rung(const RunConfig& base, std::string_view rung,
                      PatchMode patch = PatchMode::extract);

std::vector<RunReport> run_ablation_ladder(const DeskSplit& split, const RunConfig& base,
                                           const ScoreTable& scores,
                                           PatchMode patch = PatchMode::extract);

struct CostReport {
  std::vector<StageCost> stages;
  double stage_seconds = 0.0;
  double total_seconds = 0.0;
  std::uintmax_t total_bytes = 0;
};

CostReport cost_report(const RunReport& report);
void write_cost_report(std::ostream& out, const CostReport& report);

/// CSV line per report, header written when `with_header`.
void write_run_reports(std::ostream& out, const std::vector<RunReport>& reports,
                       bool with_header = true);
/// Appends to `path`, adding the header when the file is new.
void append_run_report(const std::filesystem::path& path, const RunReport& report);

inline constexpr std::string_view kTableTags[] = {"pruning-rules", "crop-ratio", "reg-augment",
                                                 "entropy-lab"};

struct TableOptions {
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  /// Entropy experiments.
  int n_crops = 100;
  int stratum_ipc = 10;
};

/// Runs one experiment grid and writes its tables into `out_dir`. Returns
/// the files written. Unknown tags throw InvalidArgument listing valid ones.
std::vector<std::filesystem::path> run_table_experiments(std::string_view tag,
                                                         const RunConfig& config,
                                                         const std::filesystem::path& out_dir,
                                                         const TableOptions& options = {});

// Building blocks of the tables, exposed for the acceptance checks.

struct PruningRuleCell {
  Metric metric = Metric::el2n;
  int ipc = 0;
  Direction direction = Direction::easy;
  bool balanced = true;
  std::vector<double> accuracy;  // per seed
};

std::vector<PruningRuleCell> pruning_rule_grid(const DeskSplit& split, const RunConfig& config,
                                               const ScoreTable& scores,
                                               std::span<const Metric> metrics,
                                               std::span<const int> ipcs,
                                               std::span<const std::uint64_t> seeds);

/// Balanced or unbalanced subset without combining, evaluated with the
/// config's crop/flip pipeline.
RunReport evaluate_selection(const DeskSplit& split, const RunConfig& config,
                             const ScoreTable& scores, const SelectionSpec& spec);

/// Five pruned strata of the training set: easy-only, easy+balanced,
/// random, hard+balanced, hard-only. `ipc` samples per class (or the same
/// total for the unbalanced ones).
std::vector<Stratum> entropy_strata(const DatasetView& train, const ScoreTable& scores, int ipc,
                                    std::uint64_t seed);

/// Observer for the entropy experiments: the toy model trained on the full
/// training set.
ToyModel train_observer(const DatasetView& train, const TrainConfig& config);

}  // namespace dscomp
