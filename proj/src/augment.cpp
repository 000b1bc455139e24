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

#include "dscomp/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dscomp/error.hpp"

namespace dscomp {

void CropSpec::validate() const {
  if (!(r_min > 0.0 && r_min <= r_max && r_max <= 1.0)) {
    throw InvalidArgument("crop scale range must satisfy 0 < r_min <= r_max <= 1");
  }
  if (!(aspect_min > 0.0 && aspect_min <= aspect_max)) {
    throw InvalidArgument("crop aspect range must satisfy 0 < aspect_min <= aspect_max");
  }
  if (out_side < 1) throw InvalidArgument("crop out_side must be >= 1");
  if (max_attempts < 1) throw InvalidArgument("crop max_attempts must be >= 1");
}

CropSpec CropSpec::square(double r, int out_side) {
  CropSpec spec;
  spec.r_min = r;
  spec.r_max = 1.0;
  spec.aspect_min = 1.0;
  spec.aspect_max = 1.0;
  spec.out_side = out_side;
  return spec;
}

CropDraw sample_crop_rect(int height, int width, const CropSpec& spec, RandomStream& stream) {
  const double area = static_cast<double>(height) * width;
  const double log_lo = std::log(spec.aspect_min);
  const double log_hi = std::log(spec.aspect_max);
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    const double target = stream.uniform(spec.r_min, spec.r_max) * area;
    const double aspect = std::exp(stream.uniform(log_lo, log_hi));
    const auto w = static_cast<int>(std::lround(std::sqrt(target * aspect)));
    const auto h = static_cast<int>(std::lround(std::sqrt(target / aspect)));
    if (w >= 1 && h >= 1 && w <= width && h <= height) {
      const int top = stream.integer(0, height - h);
      const int left = stream.integer(0, width - w);
      return {{top, left, h, w}, false};
    }
  }
  return {center_square(height, width), true};
}

CropResult random_resized_crop(const RasterImage& image, const CropSpec& spec,
                               RandomStream& stream, Interpolation mode) {
  CropResult result;
  result.draw = sample_crop_rect(image.height(), image.width(), spec, stream);
  const CropRect& r = result.draw.rect;
  if (r.top == 0 && r.left == 0 && r.height == image.height() && r.width == image.width()) {
    result.image = resize(image, spec.out_side, spec.out_side, mode);
  } else {
    result.image = resize(crop(image, r), spec.out_side, spec.out_side, mode);
  }
  return result;
}

namespace {

int checked_cell_side(const RasterImage& composite, int k) {
  if (k < 1) throw InvalidArgument("grid k must be >= 1");
  if (composite.height() != composite.width() || composite.height() % k != 0) {
    throw InvalidArgument("composite must be square with a side divisible by k");
  }
  return composite.height() / k;
}

}  // namespace

PatchChoice patch_extract(const RasterImage& composite, int k, RandomStream& stream) {
  const int cell = checked_cell_side(composite, k);
  if (k == 1) return {composite, 0, 0};
  const auto index = static_cast<int>(stream.index(static_cast<std::size_t>(k) * k));
  PatchChoice choice;
  choice.row = index / k;
  choice.col = index % k;
  choice.image = crop(composite, {choice.row * cell, choice.col * cell, cell, cell});
  return choice;
}

RasterImage patch_shuffle(const RasterImage& composite, int k, RandomStream& stream,
                          std::vector<int>* permutation) {
  const int cell = checked_cell_side(composite, k);
  std::vector<int> perm(static_cast<std::size_t>(k) * k);
  std::iota(perm.begin(), perm.end(), 0);
  if (k > 1) std::shuffle(perm.begin(), perm.end(), stream.engine());
  if (permutation) *permutation = perm;
  if (k == 1) return composite;

  RasterImage out(composite.height(), composite.width(), composite.channels());
  for (int dst = 0; dst < k * k; ++dst) {
    const int src = perm[static_cast<std::size_t>(dst)];
    const RasterImage tile = crop(composite, {(src / k) * cell, (src % k) * cell, cell, cell});
    paste(out, tile, (dst / k) * cell, (dst % k) * cell);
  }
  return out;
}

RasterImage horizontal_flip(const RasterImage& image, RandomStream& stream, double prob,
                            bool* flipped) {
  const bool flip = stream.bernoulli(prob);
  if (flipped) *flipped = flip;
  return flip ? flip_horizontal(image) : image;
}

std::string_view to_string(MixKind kind) noexcept {
  switch (kind) {
    case MixKind::none: return "none";
    case MixKind::cutout: return "cutout";
    case MixKind::mixup: return "mixup";
    case MixKind::cutmix: return "cutmix";
  }
  return "?";
}

MixKind parse_mix_kind(std::string_view text) {
  if (text == "none") return MixKind::none;
  if (text == "cutout") return MixKind::cutout;
  if (text == "mixup") return MixKind::mixup;
  if (text == "cutmix") return MixKind::cutmix;
  throw InvalidArgument("unknown mix kind '" + std::string(text) +
                        "' (expected none, cutout, mixup or cutmix)");
}

void MixSpec::validate() const {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw InvalidArgument("mix probability must lie in [0, 1]");
  }
  if (!(cutout_fraction > 0.0 && cutout_fraction <= 1.0)) {
    throw InvalidArgument("cutout_fraction must lie in (0, 1]");
  }
  if (!(beta_alpha > 0.0)) throw InvalidArgument("beta_alpha must be > 0");
}

std::vector<double> one_hot(int label, int num_classes) {
  if (label < 0 || label >= num_classes) throw InvalidArgument("label outside class range");
  std::vector<double> w(static_cast<std::size_t>(num_classes), 0.0);
  w[static_cast<std::size_t>(label)] = 1.0;
  return w;
}

CropRect sample_cutout_box(int height, int width, double cutout_fraction, RandomStream& stream) {
  const int bh = std::max(1, static_cast<int>(std::lround(cutout_fraction * height)));
  const int bw = std::max(1, static_cast<int>(std::lround(cutout_fraction * width)));
  const int cy = stream.integer(0, height - 1);
  const int cx = stream.integer(0, width - 1);
  const int y0 = std::max(0, cy - bh / 2);
  const int y1 = std::min(height, cy - bh / 2 + bh);
  const int x0 = std::max(0, cx - bw / 2);
  const int x1 = std::min(width, cx - bw / 2 + bw);
  return {y0, x0, y1 - y0, x1 - x0};
}

RasterImage apply_cutout(const RasterImage& image, const CropRect& box) {
  RasterImage out = image;
  for (int y = box.top; y < box.top + box.height; ++y) {
    for (int x = box.left; x < box.left + box.width; ++x) {
      for (int c = 0; c < out.channels(); ++c) out.at(y, x, c) = 0.0f;
    }
  }
  return out;
}

RasterImage cutout(const RasterImage& image, const MixSpec& spec, RandomStream& stream) {
  return apply_cutout(image,
                      sample_cutout_box(image.height(), image.width(), spec.cutout_fraction, stream));
}

AugmentedSample mixup_blend(const RasterImage& a, int label_a, const RasterImage& b, int label_b,
                            int num_classes, double lambda, bool label_mixing) {
  if (!a.same_shape(b)) throw InvalidArgument("mixup: image shapes differ");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("mixup: lambda outside [0,1]");
  AugmentedSample out;
  out.image = RasterImage(a.height(), a.width(), a.channels());
  const auto l = static_cast<float>(lambda);
  auto pa = a.pixels();
  auto pb = b.pixels();
  auto po = out.image.pixels();
  for (std::size_t i = 0; i < po.size(); ++i) {
    po[i] = std::clamp(l * pa[i] + (1.0f - l) * pb[i], 0.0f, 1.0f);
  }
  out.label_weights = one_hot(label_a, num_classes);
  if (label_mixing) {
    out.label_weights[static_cast<std::size_t>(label_a)] = lambda;
    out.label_weights[static_cast<std::size_t>(label_b)] += 1.0 - lambda;
  }
  return out;
}

AugmentedSample mixup(const RasterImage& a, int label_a, const RasterImage& b, int label_b,
                      int num_classes, const MixSpec& spec, RandomStream& stream) {
  const double lambda = stream.beta(spec.beta_alpha, spec.beta_alpha);
  return mixup_blend(a, label_a, b, label_b, num_classes, lambda, spec.label_mixing);
}

AugmentedSample cutmix_paste(const RasterImage& a, int label_a, const RasterImage& b,
                             int label_b, int num_classes, const CropRect& box,
                             bool label_mixing) {
  if (!a.same_shape(b)) throw InvalidArgument("cutmix: image shapes differ");
  AugmentedSample out;
  out.image = a;
  const bool empty = box.height <= 0 || box.width <= 0;
  if (!empty) {
    if (!box.inside(a.height(), a.width())) throw InvalidArgument("cutmix: box outside image");
    paste(out.image, crop(b, box), box.top, box.left);
  }
  const double pasted = empty ? 0.0 : static_cast<double>(box.area());
  const double lambda = 1.0 - pasted / (static_cast<double>(a.height()) * a.width());
  out.label_weights = one_hot(label_a, num_classes);
  if (label_mixing) {
    out.label_weights[static_cast<std::size_t>(label_a)] = lambda;
    out.label_weights[static_cast<std::size_t>(label_b)] += 1.0 - lambda;
  }
  return out;
}

CropRect sample_cutmix_box(int height, int width, double lambda, RandomStream& stream) {
  const double ratio = std::sqrt(1.0 - lambda);
  const auto cut_h = static_cast<int>(height * ratio);
  const auto cut_w = static_cast<int>(width * ratio);
  const int cy = stream.integer(0, height - 1);
  const int cx = stream.integer(0, width - 1);
  const int y0 = std::clamp(cy - cut_h / 2, 0, height);
  const int y1 = std::clamp(cy + cut_h / 2, 0, height);
  const int x0 = std::clamp(cx - cut_w / 2, 0, width);
  const int x1 = std::clamp(cx + cut_w / 2, 0, width);
  return {y0, x0, y1 - y0, x1 - x0};
}

AugmentedSample cutmix(const RasterImage& a, int label_a, const RasterImage& b, int label_b,
                       int num_classes, const MixSpec& spec, RandomStream& stream) {
  const double lambda = stream.beta(spec.beta_alpha, spec.beta_alpha);
  const CropRect box = sample_cutmix_box(a.height(), a.width(), lambda, stream);
  return cutmix_paste(a, label_a, b, label_b, num_classes, box, spec.label_mixing);
}

std::string_view to_string(PatchMode mode) noexcept {
  switch (mode) {
    case PatchMode::none: return "none";
    case PatchMode::extract: return "extract";
    case PatchMode::shuffle: return "shuffle";
  }
  return "?";
}

PatchMode parse_patch_mode(std::string_view text) {
  if (text == "none") return PatchMode::none;
  if (text == "extract") return PatchMode::extract;
  if (text == "shuffle") return PatchMode::shuffle;
  throw InvalidArgument("unknown patch mode '" + std::string(text) +
                        "' (expected none, extract or shuffle)");
}

void PipelineConfig::validate() const {
  if (grid_k < 1) throw InvalidArgument("pipeline grid_k must be >= 1");
  crop.validate();
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) throw InvalidArgument("flip_prob outside [0,1]");
  mix.validate();
}

PipelineConfig PipelineConfig::pca_default(int grid_k, int out_side) {
  PipelineConfig c;
  c.patch = PatchMode::extract;
  c.grid_k = grid_k;
  c.crop.out_side = out_side;
  return c;
}

PipelineConfig PipelineConfig::crop_flip(int out_side) {
  PipelineConfig c;
  c.crop.out_side = out_side;
  return c;
}

PipelineConfig PipelineConfig::identity(int out_side) {
  PipelineConfig c;
  c.crop_enabled = false;
  c.flip_enabled = false;
  c.crop.out_side = out_side;
  return c;
}

GeometricOutput apply_geometric(const RasterImage& input, const PipelineConfig& config,
                                RandomStream& stream) {
  GeometricOutput out;
  const RasterImage* current = &input;
  RasterImage patch;
  if (config.patch == PatchMode::extract) {
    patch = patch_extract(input, config.grid_k, stream).image;
    current = &patch;
  } else if (config.patch == PatchMode::shuffle) {
    patch = patch_shuffle(input, config.grid_k, stream);
    current = &patch;
  }

  const int side = config.crop.out_side;
  if (config.crop_enabled) {
    out.image = random_resized_crop(*current, config.crop, stream, config.interpolation).image;
  } else {
    out.image = resize(*current, side, side, config.interpolation);
  }
  if (config.flip_enabled) out.image = horizontal_flip(out.image, stream, config.flip_prob);
  out.mix = config.mix.kind != MixKind::none && stream.bernoulli(config.mix.probability);
  return out;
}

namespace {

bool needs_partner(MixKind kind) { return kind == MixKind::mixup || kind == MixKind::cutmix; }

AugmentedSample finish(GeometricOutput geo, int label, int num_classes,
                       const PipelineConfig& config, RandomStream& stream,
                       std::optional<MixPartner> partner) {
  if (geo.mix) {
    switch (config.mix.kind) {
      case MixKind::cutout:
        return {cutout(geo.image, config.mix, stream), one_hot(label, num_classes)};
      case MixKind::mixup:
        if (partner) {
          return mixup(geo.image, label, *partner->image, partner->label, num_classes,
                       config.mix, stream);
        }
        break;
      case MixKind::cutmix:
        if (partner) {
          return cutmix(geo.image, label, *partner->image, partner->label, num_classes,
                        config.mix, stream);
        }
        break;
      case MixKind::none: break;
    }
  }
  return {std::move(geo.image), one_hot(label, num_classes)};
}

}  // namespace

AugmentedSample apply_pipeline(const RasterImage& input, int label, int num_classes,
                               const PipelineConfig& config, RandomStream& stream,
                               std::optional<MixPartner> partner) {
  GeometricOutput geo = apply_geometric(input, config, stream);
  return finish(std::move(geo), label, num_classes, config, stream, partner);
}

std::vector<AugmentedSample> augment_batch(std::span<const RasterImage* const> inputs,
                                           std::span<const int> labels, int num_classes,
                                           const PipelineConfig& config,
                                           std::span<RandomStream> streams) {
  const std::size_t n = inputs.size();
  if (labels.size() != n || streams.size() != n) {
    throw InvalidArgument("augment_batch: inputs, labels and streams differ in length");
  }
  std::vector<GeometricOutput> geo;
  geo.reserve(n);
  for (std::size_t i = 0; i < n; ++i) geo.push_back(apply_geometric(*inputs[i], config, streams[i]));

  std::vector<AugmentedSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<MixPartner> partner;
    if (geo[i].mix && needs_partner(config.mix.kind) && n > 1) {
      std::size_t j = streams[i].index(n - 1);
      if (j >= i) ++j;
      partner = MixPartner{&geo[j].image, labels[j]};
    }
    // Partners read geo[j].image, so copy rather than move out of geo[i].
    out.push_back(finish(geo[i], labels[i], num_classes, config, streams[i], partner));
  }
  return out;
}

}  // namespace dscomp
