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

// Training-time augmentation. Every transform draws from a caller-supplied
// RandomStream, so the same (input, config, stream) always yields the same
// output regardless of batch order or threading.

#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dscomp/combiner.hpp"
#include "dscomp/image.hpp"
#include "dscomp/random.hpp"

namespace dscomp {

struct CropSpec {
  double r_min = 0.08;
  double r_max = 1.0;
  double aspect_min = 3.0 / 4.0;
  double aspect_max = 4.0 / 3.0;
  int out_side = 32;
  int max_attempts = 10;

  void validate() const;
  /// Square crops with area fraction in (r, 1.0), as used by the entropy experiments.
  static CropSpec square(double r, int out_side);
};

struct CropDraw {
  CropRect rect;
  /// True when all attempts failed and the centred square was used.
  bool fallback = false;
};

/// Samples a crop rectangle inside a height x width image.
CropDraw sample_crop_rect(int height, int width, const CropSpec& spec, RandomStream& stream);

struct CropResult {
  RasterImage image;
  CropDraw draw;
};

CropResult random_resized_crop(const RasterImage& image, const CropSpec& spec,
                               RandomStream& stream,
                               Interpolation mode = Interpolation::bilinear);

struct PatchChoice {
  RasterImage image;
  int row = 0;
  int col = 0;
};

/// Picks one cell of a k x k composite uniformly and returns it.
PatchChoice patch_extract(const RasterImage& composite, int k, RandomStream& stream);
inline PatchChoice patch_extract(const CompositeImage& composite, RandomStream& stream) {
  return patch_extract(composite.image, composite.grid.k, stream);
}

/// Rearranges the cells by a uniformly random permutation. If `permutation`
/// is given it receives, for each destination cell, the source cell index.
RasterImage patch_shuffle(const RasterImage& composite, int k, RandomStream& stream,
                          std::vector<int>* permutation = nullptr);

/// Mirrors with probability `prob`; `flipped` reports the outcome.
RasterImage horizontal_flip(const RasterImage& image, RandomStream& stream, double prob = 0.5,
                            bool* flipped = nullptr);

enum class MixKind { none, cutout, mixup, cutmix };

std::string_view to_string(MixKind kind) noexcept;
MixKind parse_mix_kind(std::string_view text);

struct MixSpec {
  MixKind kind = MixKind::none;
  double probability = 0.0;
  bool label_mixing = false;
  double cutout_fraction = 0.5;
  double beta_alpha = 1.0;

  void validate() const;
};

struct AugmentedSample {
  RasterImage image;
  std::vector<double> label_weights;
};

std::vector<double> one_hot(int label, int num_classes);

/// Rectangle of (cutout_fraction * side) per axis centred at a uniform pixel,
/// clipped to the image.
CropRect sample_cutout_box(int height, int width, double cutout_fraction, RandomStream& stream);
RasterImage cutout(const RasterImage& image, const MixSpec& spec, RandomStream& stream);
/// Zeroes `box` (already clipped).
RasterImage apply_cutout(const RasterImage& image, const CropRect& box);

/// lambda * a + (1 - lambda) * b.
AugmentedSample mixup_blend(const RasterImage& a, int label_a, const RasterImage& b, int label_b,
                            int num_classes, double lambda, bool label_mixing);
AugmentedSample mixup(const RasterImage& a, int label_a, const RasterImage& b, int label_b,
                      int num_classes, const MixSpec& spec, RandomStream& stream);

/// Pastes `box` of b into a; the label weight of a is 1 - |box| / area.
AugmentedSample cutmix_paste(const RasterImage& a, int label_a, const RasterImage& b,
                             int label_b, int num_classes, const CropRect& box,
                             bool label_mixing);
/// Box for a target pasted area of (1 - lambda) * area, clipped to the image.
CropRect sample_cutmix_box(int height, int width, double lambda, RandomStream& stream);
AugmentedSample cutmix(const RasterImage& a, int label_a, const RasterImage& b, int label_b,
                       int num_classes, const MixSpec& spec, RandomStream& stream);

enum class PatchMode { none, extract, shuffle };

std::string_view to_string(PatchMode mode) noexcept;
PatchMode parse_patch_mode(std::string_view text);

/// [patch stage] -> resized crop -> flip -> (with probability p) one mixing op.
struct PipelineConfig {
  PatchMode patch = PatchMode::none;
  /// Grid of the incoming composites; 1 for plain images.
  int grid_k = 1;
  bool crop_enabled = true;
  CropSpec crop;
  bool flip_enabled = true;
  double flip_prob = 0.5;
  MixSpec mix;
  Interpolation interpolation = Interpolation::bilinear;

  void validate() const;
  /// PCA default: patch extraction, crop (0.08, 1), flip, no mixing.
  static PipelineConfig pca_default(int grid_k, int out_side);
  /// Crop and flip only.
  static PipelineConfig crop_flip(int out_side);
  /// Every stage off; images are only resized to `out_side`.
  static PipelineConfig identity(int out_side);
};

/// Result of the per-sample stages that need no partner.
struct GeometricOutput {
  RasterImage image;
  /// Whether this sample will be mixed; decided before any partner is chosen.
  bool mix = false;
};

GeometricOutput apply_geometric(const RasterImage& input, const PipelineConfig& config,
                                RandomStream& stream);

/// Partner image for mixup/cutmix, already through the geometric stages.
struct MixPartner {
  const RasterImage* image = nullptr;
  int label = 0;
};

/// Full single-sample pipeline. `partner` is consulted only when mixing is
/// triggered for a kind that needs one; without a partner those kinds are
/// skipped and the sample keeps its own label.
AugmentedSample apply_pipeline(const RasterImage& input, int label, int num_classes,
                               const PipelineConfig& config, RandomStream& stream,
                               std::optional<MixPartner> partner = std::nullopt);

/// Batch form: partners are drawn uniformly from the same batch excluding
/// self, using each sample's own stream. streams[i] belongs to inputs[i].
std::vector<AugmentedSample> augment_batch(std::span<const RasterImage* const> inputs,
                                           std::span<const int> labels, int num_classes,
                                           const PipelineConfig& config,
                                           std::span<RandomStream> streams);

}  // namespace dscomp
