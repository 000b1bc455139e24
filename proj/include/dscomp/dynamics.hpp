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

// Per-sample training dynamics and the three difficulty scores derived
// from them (EL2N, forgetting events, area under the margin).

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "dscomp/dataset.hpp"
#include "dscomp/model.hpp"

namespace dscomp {

/// State of one sample at the end of one epoch, measured in evaluation mode.
struct EpochRecord {
  ProbVector probs;
  bool correct = false;
  /// True-class logit minus the largest other logit.
  double margin = 0.0;
};

/// Builds a record from raw logits; ties in argmax go to the lowest class.
EpochRecord make_epoch_record(std::span<const float> logits, int label);

/// Complete samples x epochs grid of EpochRecords.
class DynamicsLog {
 public:
  DynamicsLog() = default;
  DynamicsLog(std::vector<SampleId> ids, std::vector<int> labels, int num_classes);

  /// Appends one epoch; `records[i]` belongs to sample_ids()[i].
  void append_epoch(std::vector<EpochRecord> records);

  std::size_t num_samples() const noexcept { return ids_.size(); }
  int epochs() const noexcept { return static_cast<int>(epochs_.size()); }
  int num_classes() const noexcept { return num_classes_; }
  std::span<const SampleId> sample_ids() const noexcept { return ids_; }
  std::span<const int> labels() const noexcept { return labels_; }

  /// Row of `id`; throws LookupError when unknown.
  std::size_t index_of(SampleId id) const;
  /// `epoch` is 0-based.
  const EpochRecord& record(std::size_t row, int epoch) const { return epochs_[epoch][row]; }

  bool operator==(const DynamicsLog& other) const;

 private:
  std::vector<SampleId> ids_;
  std::vector<int> labels_;
  int num_classes_ = 0;
  std::unordered_map<SampleId, std::size_t> index_;
  std::vector<std::vector<EpochRecord>> epochs_;
};

struct TrainResult {
  ToyModel model;
  DynamicsLog log;
};

/// Trains on the full dataset and snapshots every sample after each epoch.
TrainResult train_with_dynamics(const DatasetView& dataset, const TrainConfig& config);

/// Mean of ||p - onehot(y)||_2 over the first `early_window` epochs.
double el2n(const DynamicsLog& log, SampleId id, int early_window);
/// Number of correct -> incorrect transitions between consecutive epochs.
int forgetting(const DynamicsLog& log, SampleId id);
/// Mean margin over all logged epochs.
double aum(const DynamicsLog& log, SampleId id);

struct ScoreRow {
  SampleId sample_id = 0;
  int label = 0;
  double el2n = 0.0;
  int forgetting = 0;
  double aum = 0.0;

  bool operator==(const ScoreRow&) const = default;
};

struct ScoreTable {
  std::vector<ScoreRow> rows;

  /// max(label) + 1.
  int num_classes() const noexcept;
  bool operator==(const ScoreTable&) const = default;
};

ScoreTable build_score_table(const DynamicsLog& log, int early_window);

/// Comma-separated `sample_id,label,el2n,forgetting,aum`, 9 significant digits.
void write_scores(std::ostream& out, const ScoreTable& table);
ScoreTable read_scores(std::istream& in);
void save_scores(const ScoreTable& table, const std::filesystem::path& path);
ScoreTable load_scores(const std::filesystem::path& path);

}  // namespace dscomp
