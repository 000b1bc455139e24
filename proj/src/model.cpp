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

#include "dscomp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dscomp/error.hpp"
#include "dscomp/random.hpp"

namespace dscomp {

void TrainConfig::validate() const {
  if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
  if (early_window < 1) throw InvalidArgument("early_window must be >= 1");
  if (hidden_dim < 1) throw InvalidArgument("hidden_dim must be >= 1");
}

Eigen::VectorXf image_features(const RasterImage& image) {
  const auto px = image.pixels();
  Eigen::VectorXf x(static_cast<Eigen::Index>(px.size()));
  for (std::size_t i = 0; i < px.size(); ++i) x[static_cast<Eigen::Index>(i)] = px[i] - 0.5f;
  return x;
}

int argmax(std::span<const float> values) noexcept {
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

ProbVector softmax(std::span<const float> logits) {
  const float top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(static_cast<double>(logits[i]) - top);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return ProbVector(std::move(p));
}

ToyModel::ToyModel(int input_dim, int hidden_dim, int num_classes, std::uint64_t init_seed) {
  if (input_dim < 1 || hidden_dim < 1 || num_classes < 2) {
    throw InvalidArgument("model dimensions must be positive with >= 2 classes");
  }
  RandomStream rs = RandomStream::derive(init_seed, "model-init", 0);
  const double s1 = std::sqrt(2.0 / input_dim);
  const double s2 = std::sqrt(1.0 / hidden_dim);
  w1_.resize(hidden_dim, input_dim);
  w2_.resize(num_classes, hidden_dim);
  for (Eigen::Index i = 0; i < w1_.size(); ++i) w1_.data()[i] = static_cast<float>(rs.normal(0.0, s1));
  for (Eigen::Index i = 0; i < w2_.size(); ++i) w2_.data()[i] = static_cast<float>(rs.normal(0.0, s2));
  b1_ = Eigen::VectorXf::Zero(hidden_dim);
  b2_ = Eigen::VectorXf::Zero(num_classes);
}

Eigen::MatrixXf ToyModel::logits(const Eigen::MatrixXf& inputs) const {
  Eigen::MatrixXf hidden = ((w1_ * inputs).colwise() + b1_).cwiseMax(0.0f);
  return (w2_ * hidden).colwise() + b2_;
}

Eigen::VectorXf ToyModel::logits(const RasterImage& image) const {
  if (static_cast<int>(image.size()) != input_dim()) {
    throw InvalidArgument("image size " + std::to_string(image.size()) +
                          " does not match model input " + std::to_string(input_dim()));
  }
  return logits(Eigen::MatrixXf(image_features(image))).col(0);
}

ProbVector ToyModel::predict(const RasterImage& image) const {
  const Eigen::VectorXf z = logits(image);
  return softmax(std::span<const float>(z.data(), static_cast<std::size_t>(z.size())));
}

double ToyModel::train_step(const Eigen::MatrixXf& inputs, const Eigen::MatrixXf& targets,
                            double learning_rate) {
  const auto batch = static_cast<float>(inputs.cols());
  const Eigen::MatrixXf pre = (w1_ * inputs).colwise() + b1_;
  const Eigen::MatrixXf hidden = pre.cwiseMax(0.0f);
  Eigen::MatrixXf z = (w2_ * hidden).colwise() + b2_;

  // Softmax per column, in place; keep the loss in double.
  double loss = 0.0;
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    auto col = z.col(j);
    const float top = col.maxCoeff();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < col.size(); ++i) sum += std::exp(double(col[i]) - top);
    const double log_sum = std::log(sum) + top;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      const double log_p = double(col[i]) - log_sum;
      loss -= targets(i, j) * log_p;
      col[i] = static_cast<float>(std::exp(log_p));
    }
  }
  loss /= inputs.cols();
  if (!std::isfinite(loss)) return loss;

  const Eigen::MatrixXf dz = (z - targets) / batch;
  const Eigen::MatrixXf dh = (w2_.transpose() * dz).cwiseProduct(
      (pre.array() > 0.0f).cast<float>().matrix());
  const auto lr = static_cast<float>(learning_rate);
  w2_.noalias() -= lr * dz * hidden.transpose();
  b2_.noalias() -= lr * dz.rowwise().sum();
  w1_.noalias() -= lr * dh * inputs.transpose();
  b1_.noalias() -= lr * dh.rowwise().sum();
  return loss;
}

ToyModel train_model(std::size_t num_samples, int input_dim, int num_classes,
                     const TrainConfig& config, const BatchProvider& provider,
                     const EpochObserver& observer) {
  config.validate();
  if (num_samples == 0) throw InvalidArgument("cannot train on an empty dataset");
  ToyModel model(input_dim, config.hidden_dim, num_classes, config.seed);

  std::vector<std::size_t> order(num_samples);
  Eigen::MatrixXf inputs;
  Eigen::MatrixXf targets;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    RandomStream rs = RandomStream::derive(config.seed, "epoch-order",
                                           static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), rs.engine());

    for (std::size_t start = 0; start < num_samples; start += config.batch_size) {
      const std::size_t end = std::min(num_samples, start + config.batch_size);
      const std::span<const std::size_t> indices(order.data() + start, end - start);
      inputs.resize(input_dim, static_cast<Eigen::Index>(indices.size()));
      targets.resize(num_classes, static_cast<Eigen::Index>(indices.size()));
      provider(epoch, indices, inputs, targets);
      const double loss = model.train_step(inputs, targets, config.learning_rate);
      if (!std::isfinite(loss)) throw TrainingDivergence(epoch + 1);
    }
    if (observer) observer(epoch, model);
  }
  return model;
}

double accuracy(const ToyModel& model, const DatasetView& dataset) {
  if (dataset.samples.empty()) return 0.0;
  if (dataset.num_classes != model.num_classes()) {
    throw InvalidArgument("dataset has " + std::to_string(dataset.num_classes) +
                          " classes, model has " + std::to_string(model.num_classes()));
  }
  constexpr std::size_t kChunk = 256;
  std::size_t correct = 0;
  Eigen::MatrixXf inputs;
  for (std::size_t start = 0; start < dataset.size(); start += kChunk) {
    const std::size_t end = std::min(dataset.size(), start + kChunk);
    inputs.resize(model.input_dim(), static_cast<Eigen::Index>(end - start));
    for (std::size_t i = start; i < end; ++i) {
      inputs.col(static_cast<Eigen::Index>(i - start)) =
          image_features(dataset.samples[i].image);
    }
    const Eigen::MatrixXf z = model.logits(inputs);
    for (std::size_t i = start; i < end; ++i) {
      const auto col = z.col(static_cast<Eigen::Index>(i - start));
      if (argmax(std::span<const float>(col.data(), static_cast<std::size_t>(col.size()))) ==
          dataset.samples[i].label) {
        ++correct;
      }
    }
  }
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

}  // namespace dscomp
