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

#include "dscomp/entropy_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dscomp/error.hpp"

namespace dscomp {

namespace {

constexpr const char* kCropTag = "entropy-lab-crop";

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

// Population statistics.
MeanStd mean_std(std::span<const double> v) {
  if (v.empty()) return {};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size()))};
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

template <typename Score>
IncreaseStats increase_prob(const Observer& observer, const DatasetView& dataset, double r,
                            int n_crops, std::uint64_t seed, Score score) {
  if (n_crops < 1) throw InvalidArgument("n_crops must be >= 1");
  IncreaseStats stats;
  stats.per_sample.reserve(dataset.size());
  for (const auto& s : dataset.samples) {
    const CropSpec spec = CropSpec::square(r, s.image.height());
    const double base = score(observer(s.image), s.label);
    RandomStream stream = RandomStream::derive(seed, kCropTag, s.sample_id);
    int increased = 0;
    for (int i = 0; i < n_crops; ++i) {
      const auto cropped = random_resized_crop(s.image, spec, stream);
      if (score(observer(cropped.image), s.label) > base) ++increased;
    }
    stats.per_sample.push_back(static_cast<double>(increased) / n_crops);
  }
  const auto ms = mean_std(stats.per_sample);
  stats.mean = ms.mean;
  stats.stddev = ms.stddev;
  return stats;
}

}  // namespace

double predictive_entropy(const ProbVector& probs) {
  double h = 0.0;
  for (double p : probs.values()) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(0.0, h);
}

double label_nll(const ProbVector& probs, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= probs.size()) {
    throw InvalidArgument("label outside probability vector");
  }
  return -std::log(std::max(probs[static_cast<std::size_t>(label)], kProbabilityFloor));
}

double nll(const ToyModel& model, const DatasetView& dataset) {
  if (dataset.samples.empty()) throw InvalidArgument("nll of an empty dataset");
  if (dataset.num_classes != model.num_classes()) {
    throw InvalidArgument("dataset has " + std::to_string(dataset.num_classes) +
                          " classes, model has " + std::to_string(model.num_classes()));
  }
  double total = 0.0;
  for (const auto& s : dataset.samples) total += label_nll(model.predict(s.image), s.label);
  return total / static_cast<double>(dataset.size());
}

Observer observe(const ToyModel& model) {
  return [&model](const RasterImage& image) { return model.predict(image); };
}

SelectedCrop selective_min_nll_crop(const Observer& observer, const LabeledSample& sample,
                                    int n_crops, const CropSpec& crop_spec,
                                    RandomStream& stream, bool include_identity) {
  if (n_crops < 1) throw InvalidArgument("n_crops must be >= 1");
  SelectedCrop best;
  if (include_identity) {
    best.image = sample.image;
    best.nll = label_nll(observer(sample.image), sample.label);
    best.draw_index = -1;
  }
  for (int i = 0; i < n_crops; ++i) {
    auto cropped = random_resized_crop(sample.image, crop_spec, stream);
    const double value = label_nll(observer(cropped.image), sample.label);
    best.draw_nlls.push_back(value);
    const bool first = !include_identity && i == 0;
    if (first || value < best.nll) {
      best.image = std::move(cropped.image);
      best.nll = value;
      best.draw_index = i;
    }
  }
  return best;
}

IncreaseStats crop_nll_increase_prob(const Observer& observer, const DatasetView& dataset,
                                     double r, int n_crops, std::uint64_t seed) {
  return increase_prob(observer, dataset, r, n_crops, seed,
                       [](const ProbVector& p, int label) { return label_nll(p, label); });
}

IncreaseStats crop_entropy_increase_prob(const Observer& observer, const DatasetView& dataset,
                                         double r, int n_crops, std::uint64_t seed) {
  return increase_prob(observer, dataset, r, n_crops, seed,
                       [](const ProbVector& p, int) { return predictive_entropy(p); });
}

IncrementRecord entropy_increment_single_vs_repeated(const Observer& observer,
                                                     const DatasetView& dataset, double r,
                                                     int n_crops, std::uint64_t seed) {
  if (!(r > 0.0 && r <= 1.0)) throw InvalidArgument("crop ratio must lie in (0, 1]");
  if (n_crops < 1) throw InvalidArgument("n_crops must be >= 1");
  if (dataset.samples.empty()) throw InvalidArgument("empty dataset");
  IncrementRecord rec;
  rec.r = r;
  const double root = std::sqrt(r);
  double single_sum = 0.0;
  double repeated_sum = 0.0;
  std::size_t single_up = 0;
  std::size_t repeated_up = 0;
  for (const auto& s : dataset.samples) {
    const int side = s.image.height();
    const double base = predictive_entropy(observer(s.image));
    RandomStream single_stream = RandomStream::derive(seed, "increment-single", s.sample_id);
    RandomStream repeated_stream = RandomStream::derive(seed, "increment-repeated", s.sample_id);
    for (int i = 0; i < n_crops; ++i) {
      const auto once = random_resized_crop(s.image, CropSpec::square(r, side), single_stream);
      ++rec.single_crop_calls;
      const double d1 = predictive_entropy(observer(once.image)) - base;
      single_sum += d1;
      single_up += d1 > 0.0;

      const auto first = random_resized_crop(s.image, CropSpec::square(root, side), repeated_stream);
      const auto second =
          random_resized_crop(first.image, CropSpec::square(root, side), repeated_stream);
      rec.repeated_crop_calls += 2;
      const double d2 = predictive_entropy(observer(second.image)) - base;
      repeated_sum += d2;
      repeated_up += d2 > 0.0;
    }
  }
  const double draws = static_cast<double>(dataset.size()) * n_crops;
  rec.single_increment = single_sum / draws;
  rec.repeated_increment = repeated_sum / draws;
  rec.single_increase_prob = static_cast<double>(single_up) / draws;
  rec.repeated_increase_prob = static_cast<double>(repeated_up) / draws;
  return rec;
}

double AnalysisRecord::mean_dl() const {
  if (crop_nll.empty()) return 0.0;
  double sum = 0.0;
  for (double v : crop_nll) sum += v - base_nll;
  return sum / static_cast<double>(crop_nll.size());
}

double AnalysisRecord::mean_dh() const {
  if (crop_entropy.empty()) return 0.0;
  double sum = 0.0;
  for (double v : crop_entropy) sum += v - base_entropy;
  return sum / static_cast<double>(crop_entropy.size());
}

AnalysisRecord analyze_sample(const Observer& observer, const LabeledSample& sample, double r,
                              int n_crops, std::uint64_t seed) {
  if (n_crops < 1) throw InvalidArgument("n_crops must be >= 1");
  AnalysisRecord rec;
  rec.sample_id = sample.sample_id;
  const ProbVector base = observer(sample.image);
  rec.base_nll = label_nll(base, sample.label);
  rec.base_entropy = predictive_entropy(base);
  const CropSpec spec = CropSpec::square(r, sample.image.height());
  RandomStream stream = RandomStream::derive(seed, kCropTag, sample.sample_id);
  for (int i = 0; i < n_crops; ++i) {
    const ProbVector p = observer(random_resized_crop(sample.image, spec, stream).image);
    rec.crop_nll.push_back(label_nll(p, sample.label));
    rec.crop_entropy.push_back(predictive_entropy(p));
  }
  return rec;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("pearson: length mismatch");
  if (x.size() < 2) return std::nullopt;
  const auto n = static_cast<double>(x.size());
  // Centre first; the one-pass sum-of-products form loses precision.
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationReport correlation_report(std::string stratum, std::span<const double> dl,
                                     std::span<const double> dh) {
  if (dl.size() != dh.size()) throw InvalidArgument("dL and dH differ in length");
  if (dl.size() < 3) {
    throw InvalidArgument("stratum '" + stratum + "' has " + std::to_string(dl.size()) +
                          " samples; at least 3 are required");
  }
  CorrelationReport rep;
  rep.stratum = std::move(stratum);
  rep.samples = dl.size();
  rep.rho = pearson(dl, dh);
  std::size_t concordant = 0;
  for (std::size_t i = 0; i < dl.size(); ++i) {
    const int a = sign_of(dl[i]);
    const int b = sign_of(dh[i]);
    if (a == 0 || b == 0 || a == b) ++concordant;
  }
  rep.concordant_fraction = static_cast<double>(concordant) / static_cast<double>(dl.size());
  const auto l = mean_std(dl);
  const auto h = mean_std(dh);
  rep.mean_dl = l.mean;
  rep.std_dl = l.stddev;
  rep.mean_dh = h.mean;
  rep.std_dh = h.stddev;
  return rep;
}

std::vector<CorrelationReport> nll_entropy_correlation(const Observer& observer,
                                                       std::span<const Stratum> strata,
                                                       double r, int n_crops,
                                                       std::uint64_t seed) {
  if (n_crops < 1) throw InvalidArgument("n_crops must be >= 1");
  std::vector<CorrelationReport> reports;
  for (const auto& stratum : strata) {
    std::vector<double> dl;
    std::vector<double> dh;
    for (const auto& s : stratum.dataset.samples) {
      const AnalysisRecord rec = analyze_sample(observer, s, r, n_crops, seed);
      dl.push_back(rec.mean_dl());
      dh.push_back(rec.mean_dh());
    }
    reports.push_back(correlation_report(stratum.name, dl, dh));
  }
  return reports;
}

}  // namespace dscomp
