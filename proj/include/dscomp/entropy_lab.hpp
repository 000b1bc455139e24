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

// NLL, predictive entropy, and the crop experiments built on them.
//
// All quantities are in nats. Every experiment keys its random stream by
// (seed, sample_id), so results do not depend on sample order and are
// folded in dataset order.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dscomp/augment.hpp"
#include "dscomp/dataset.hpp"
#include "dscomp/model.hpp"

namespace dscomp {

inline constexpr double kProbabilityFloor = 1e-12;

/// -sum p log p with 0 log 0 = 0.
double predictive_entropy(const ProbVector& probs);

/// -log max(p[label], 1e-12).
double label_nll(const ProbVector& probs, int label);

/// Mean NLL of the true labels; throws InvalidArgument on a class-count mismatch.
double nll(const ToyModel& model, const DatasetView& dataset);

/// Anything that maps an image to a class distribution. The toy model is
/// the usual observer; tests plug in closed-form ones.
using Observer = std::function<ProbVector(const RasterImage&)>;
Observer observe(const ToyModel& model);

struct SelectedCrop {
  RasterImage image;
  double nll = 0.0;
  /// -1 when the untouched image won; otherwise the winning draw.
  int draw_index = -1;
  /// NLL of every draw, in draw order.
  std::vector<double> draw_nlls;
};

/// Draws n_crops crops, scores each by its NLL and returns the minimum.
/// With include_identity the untouched image competes too (and wins ties).
SelectedCrop selective_min_nll_crop(const Observer& observer, const LabeledSample& sample,
                                    int n_crops, const CropSpec& crop_spec,
                                    RandomStream& stream, bool include_identity = true);

struct IncreaseStats {
  double mean = 0.0;
  double stddev = 0.0;
  /// Fraction of crops with a strict increase, per sample in dataset order.
  std::vector<double> per_sample;
};

/// Share of crops (area in (r, 1), square) whose NLL exceeds the original's.
IncreaseStats crop_nll_increase_prob(const Observer& observer, const DatasetView& dataset,
                                     double r, int n_crops, std::uint64_t seed);
/// Same with predictive entropy.
IncreaseStats crop_entropy_increase_prob(const Observer& observer, const DatasetView& dataset,
                                         double r, int n_crops, std::uint64_t seed);

struct IncrementRecord {
  double r = 1.0;
  /// Mean over samples and draws of H(crop_r(x)) - H(x).
  double single_increment = 0.0;
  /// Same for crop_sqrt(r)(crop_sqrt(r)(x)).
  double repeated_increment = 0.0;
  double single_increase_prob = 0.0;
  double repeated_increase_prob = 0.0;
  std::size_t single_crop_calls = 0;
  std::size_t repeated_crop_calls = 0;
};

IncrementRecord entropy_increment_single_vs_repeated(const Observer& observer,
                                                     const DatasetView& dataset, double r,
                                                     int n_crops, std::uint64_t seed);

/// Per-sample record of how crops move NLL and entropy.
struct AnalysisRecord {
  SampleId sample_id = 0;
  double base_nll = 0.0;
  double base_entropy = 0.0;
  std::vector<double> crop_nll;
  std::vector<double> crop_entropy;

  /// Mean of crop_nll - base_nll.
  double mean_dl() const;
  /// Mean of crop_entropy - base_entropy.
  double mean_dh() const;
};

/// Scores n_crops square crops with area in (r, 1). The crop stream is keyed
/// by (seed, sample_id) and shared with crop_*_increase_prob.
AnalysisRecord analyze_sample(const Observer& observer, const LabeledSample& sample, double r,
                              int n_crops, std::uint64_t seed);

/// Pearson correlation; nullopt when either side has zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationReport {
  std::string stratum;
  /// nullopt marks an undefined correlation (zero variance).
  std::optional<double> rho;
  double concordant_fraction = 0.0;
  double mean_dl = 0.0;
  double std_dl = 0.0;
  double mean_dh = 0.0;
  double std_dh = 0.0;
  std::size_t samples = 0;
};

/// Correlation statistics of per-sample (dL, dH) pairs. Pairs with
/// sign(dL) == sign(dH) count as concordant; a zero matches anything.
/// Throws InvalidArgument with fewer than 3 pairs.
CorrelationReport correlation_report(std::string stratum, std::span<const double> dl,
                                     std::span<const double> dh);

struct Stratum {
  std::string name;
  DatasetView dataset;
};

/// Per stratum: per-sample mean dL and dH over n_crops crops in (r, 1).
std::vector<CorrelationReport> nll_entropy_correlation(const Observer& observer,
                                                       std::span<const Stratum> strata,
                                                       double r, int n_crops,
                                                       std::uint64_t seed);

}  // namespace dscomp
