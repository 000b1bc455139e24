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
#include <span>
#include <vector>

namespace dscomp {

enum class Interpolation {
  bilinear,
  /// Exact pixel provenance; used by containment tests.
  nearest,
};

/// Dense H x W x C image, row-major and channel-last, values in [0, 1].
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int height, int width, int channels, float fill = 0.0f);
  /// Takes ownership of `pixels`; throws InvalidArgument if the shape or
  /// value range is violated.
  RasterImage(int height, int width, int channels, std::vector<float> pixels);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  float& at(int y, int x, int c) noexcept {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  float at(int y, int x, int c) const noexcept {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<float> pixels() noexcept { return pixels_; }
  std::span<const float> pixels() const noexcept { return pixels_; }

  bool same_shape(const RasterImage& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  /// Throws InvalidArgument unless every invariant holds.
  void validate() const;

  bool operator==(const RasterImage&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> pixels_;
};

/// Axis-aligned pixel rectangle [top, top+height) x [left, left+width).
struct CropRect {
  int top = 0;
  int left = 0;
  int height = 0;
  int width = 0;

  bool inside(int image_height, int image_width) const noexcept {
    return top >= 0 && left >= 0 && height >= 1 && width >= 1 &&
           top + height <= image_height && left + width <= image_width;
  }
  bool contains(const CropRect& inner) const noexcept {
    return inner.top >= top && inner.left >= left &&
           inner.top + inner.height <= top + height &&
           inner.left + inner.width <= left + width;
  }
  long area() const noexcept { return static_cast<long>(height) * width; }
  bool operator==(const CropRect&) const = default;
};

RasterImage crop(const RasterImage& image, const CropRect& rect);

/// Half-pixel-centre resampling. Same-size resizes are the identity.
RasterImage resize(const RasterImage& image, int out_height, int out_width,
                   Interpolation mode = Interpolation::bilinear);

/// Largest square centred on the shorter side.
CropRect center_square(int height, int width) noexcept;

/// Centre-crop the largest square, then resize it to side x side.
RasterImage standardize_image(const RasterImage& image, int side,
                              Interpolation mode = Interpolation::bilinear);

RasterImage flip_horizontal(const RasterImage& image);

/// Copy `src` into `dst` with its top-left corner at (top, left).
void paste(RasterImage& dst, const RasterImage& src, int top, int left);

/// Source-pixel index sampled by nearest-neighbour resizing `in` -> `out`.
int nearest_source_index(int out_index, int in_size, int out_size) noexcept;

}  // namespace dscomp
