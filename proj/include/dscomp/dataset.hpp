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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dscomp/image.hpp"

namespace dscomp {

using SampleId = std::uint64_t;

struct LabeledSample {
  RasterImage image;
  int label = 0;
  SampleId sample_id = 0;
};

/// Ordered samples of a C-class problem. Order is part of the contract:
/// it is preserved by every file round-trip.
struct DatasetView {
  std::vector<LabeledSample> samples;
  int num_classes = 0;
  std::string name;

  std::size_t size() const noexcept { return samples.size(); }

  /// Non-empty, labels in range, ids unique, images valid.
  void validate() const;
  /// Samples of one class, in dataset order.
  std::vector<const LabeledSample*> of_class(int label) const;
  /// Throws LookupError for an unknown id.
  const LabeledSample& find(SampleId id) const;
};

/// Categorical distribution over C classes.
class ProbVector {
 public:
  ProbVector() = default;
  /// Throws InvalidArgument unless entries are >= 0 and sum to 1 within 1e-9.
  explicit ProbVector(std::vector<double> probs);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const noexcept { return probs_[i]; }
  std::span<const double> values() const noexcept { return probs_; }
  /// Lowest index among the maxima.
  int argmax() const noexcept;

  bool operator==(const ProbVector&) const = default;

 private:
  std::vector<double> probs_;
};

/// Procedural stand-in for a natural-image dataset.
///
/// Every class owns a fixed texture (two oriented colour gratings plus a
/// colour cast) that depends only on the class index, so train and test
/// splits generated with different ids share the same classes. Each sample
/// adds a translation jitter, a contrast change, a blend with a distractor
/// class texture and pixel noise; the strength of the last two is the
/// sample's latent difficulty, and some classes are noisier than others.
///
/// Samples are class-major with ids first_id, first_id+1, ...; the random
/// stream of a sample is keyed by (seed, id), so the result is a pure
/// function of the arguments.
DatasetView generate_synthetic_dataset(int num_classes, int per_class, int side,
                                       std::uint64_t seed, SampleId first_id = 0);

/// Default desk-scale train/test pair with disjoint id ranges.
struct DeskSplit {
  DatasetView train;
  DatasetView test;
};
DeskSplit make_desk_split(int num_classes = 10, int train_per_class = 200,
                          int test_per_class = 100, int side = 32, std::uint64_t seed = 1);

/// FNV-style digest over labels, ids and pixel bits.
std::uint64_t dataset_hash(const DatasetView& dataset);

/// Keep only the listed ids, in the listed order.
DatasetView subset_view(const DatasetView& dataset, std::span<const SampleId> ids,
                        std::string name);

/// Dataset directory: images.dct (rank-4 batch) plus labels.csv.
void save_dataset(const DatasetView& dataset, const std::filesystem::path& dir);
DatasetView load_dataset(const std::filesystem::path& dir);

}  // namespace dscomp
