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

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dscomp/dataset.hpp"
#include "dscomp/image.hpp"

namespace dscomp {

struct TrainConfig {
  int epochs = 30;
  int batch_size = 32;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
  /// Epochs averaged by EL2N; clamped to `epochs` by effective_early_window().
  int early_window = 10;
  int hidden_dim = 64;

  void validate() const;
  int effective_early_window() const noexcept {
    return early_window < epochs ? early_window : epochs;
  }
};

/// Flattened pixels shifted to [-0.5, 0.5]; the model's input encoding.
Eigen::VectorXf image_features(const RasterImage& image);

/// Index of the largest value; ties resolve to the lowest index.
int argmax(std::span<const float> values) noexcept;

/// Numerically stable softmax evaluated in double precision.
ProbVector softmax(std::span<const float> logits);

/// One hidden rectified layer followed by a softmax head.
class ToyModel {
 public:
  ToyModel(int input_dim, int hidden_dim, int num_classes, std::uint64_t init_seed);

  int input_dim() const noexcept { return static_cast<int>(w1_.cols()); }
  int hidden_dim() const noexcept { return static_cast<int>(w1_.rows()); }
  int num_classes() const noexcept { return static_cast<int>(w2_.rows()); }

  /// Columns of `inputs` are samples; returns C x B logits.
  Eigen::MatrixXf logits(const Eigen::MatrixXf& inputs) const;
  Eigen::VectorXf logits(const RasterImage& image) const;
  ProbVector predict(const RasterImage& image) const;

  /// One plain gradient-descent step on soft-target cross-entropy.
  /// Columns of `targets` are probability vectors. Returns the mean loss.
  double train_step(const Eigen::MatrixXf& inputs, const Eigen::MatrixXf& targets,
                    double learning_rate);

  bool operator==(const ToyModel& other) const {
    return w1_ == other.w1_ && b1_ == other.b1_ && w2_ == other.w2_ && b2_ == other.b2_;
  }

 private:
  Eigen::MatrixXf w1_;
  Eigen::VectorXf b1_;
  Eigen::MatrixXf w2_;
  Eigen::VectorXf b2_;
};

/// Fills one mini-batch: `inputs` is input_dim x B, `targets` is C x B.
/// `epoch` is 0-based.
using BatchProvider = std::function<void(int epoch, std::span<const std::size_t> indices,
                                         Eigen::MatrixXf& inputs, Eigen::MatrixXf& targets)>;
/// Called after every epoch with the 0-based epoch index.
using EpochObserver = std::function<void(int epoch, const ToyModel& model)>;

/// Mini-batch training loop shared by score generation and evaluation.
/// Initialization and per-epoch visiting order derive from config.seed only.
/// Throws TrainingDivergence naming the 1-based epoch on a non-finite loss.
ToyModel train_model(std::size_t num_samples, int input_dim, int num_classes,
                     const TrainConfig& config, const BatchProvider& provider,
                     const EpochObserver& observer = {});

/// Top-1 accuracy of `model` on `dataset`.
double accuracy(const ToyModel& model, const DatasetView& dataset);

}  // namespace dscomp
