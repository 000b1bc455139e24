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

#include "dscomp/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dscomp/error.hpp"

namespace dscomp {

namespace {

void check_shape(int height, int width, int channels) {
  if (height < 1 || width < 1) {
    throw InvalidArgument("image dimensions must be >= 1, got " + std::to_string(height) +
                          "x" + std::to_string(width));
  }
  if (channels != 1 && channels != 3) {
    throw InvalidArgument("image channels must be 1 or 3, got " + std::to_string(channels));
  }
}

struct Tap {
  int lo;
  int hi;
  float frac;
};

// Bilinear tap for output index `o` when mapping in_size -> out_size.
Tap bilinear_tap(int o, int in_size, int out_size) {
  const double scale = static_cast<double>(in_size) / out_size;
  double src = (o + 0.5) * scale - 0.5;
  src = std::clamp(src, 0.0, static_cast<double>(in_size - 1));
  const int lo = static_cast<int>(std::floor(src));
  const int hi = std::min(lo + 1, in_size - 1);
  return {lo, hi, static_cast<float>(src - lo)};
}

}  // namespace

RasterImage::RasterImage(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels) {
  check_shape(height, width, channels);
  pixels_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

RasterImage::RasterImage(int height, int width, int channels, std::vector<float> pixels)
    : height_(height), width_(width), channels_(channels), pixels_(std::move(pixels)) {
  validate();
}

void RasterImage::validate() const {
  check_shape(height_, width_, channels_);
  if (pixels_.size() != static_cast<std::size_t>(height_) * width_ * channels_) {
    throw InvalidArgument("pixel buffer size does not match image shape");
  }
  for (float v : pixels_) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw InvalidArgument("pixel value outside [0,1]: " + std::to_string(v));
    }
  }
}

int nearest_source_index(int out_index, int in_size, int out_size) noexcept {
  const double scale = static_cast<double>(in_size) / out_size;
  const int src = static_cast<int>(std::floor((out_index + 0.5) * scale));
  return std::clamp(src, 0, in_size - 1);
}

RasterImage crop(const RasterImage& image, const CropRect& rect) {
  if (!rect.inside(image.height(), image.width())) {
    throw InvalidArgument("crop rectangle outside image bounds");
  }
  RasterImage out(rect.height, rect.width, image.channels());
  const int c = image.channels();
  for (int y = 0; y < rect.height; ++y) {
    const float* src = &image.pixels()[(static_cast<std::size_t>(rect.top + y) * image.width() +
                                        rect.left) * c];
    std::copy(src, src + static_cast<std::size_t>(rect.width) * c, &out.at(y, 0, 0));
  }
  return out;
}

RasterImage resize(const RasterImage& image, int out_height, int out_width,
                   Interpolation mode) {
  if (out_height < 1 || out_width < 1) throw InvalidArgument("resize target must be >= 1");
  if (out_height == image.height() && out_width == image.width()) return image;

  const int channels = image.channels();
  RasterImage out(out_height, out_width, channels);
  if (mode == Interpolation::nearest) {
    for (int y = 0; y < out_height; ++y) {
      const int sy = nearest_source_index(y, image.height(), out_height);
      for (int x = 0; x < out_width; ++x) {
        const int sx = nearest_source_index(x, image.width(), out_width);
        for (int c = 0; c < channels; ++c) out.at(y, x, c) = image.at(sy, sx, c);
      }
    }
    return out;
  }

  std::vector<Tap> xtaps(out_width);
  for (int x = 0; x < out_width; ++x) xtaps[x] = bilinear_tap(x, image.width(), out_width);
  for (int y = 0; y < out_height; ++y) {
    const Tap ty = bilinear_tap(y, image.height(), out_height);
    for (int x = 0; x < out_width; ++x) {
      const Tap& tx = xtaps[x];
      for (int c = 0; c < channels; ++c) {
        const float top = image.at(ty.lo, tx.lo, c) * (1.0f - tx.frac) +
                          image.at(ty.lo, tx.hi, c) * tx.frac;
        const float bottom = image.at(ty.hi, tx.lo, c) * (1.0f - tx.frac) +
                             image.at(ty.hi, tx.hi, c) * tx.frac;
        // Convex combination, clamp only guards float rounding.
        out.at(y, x, c) = std::clamp(top * (1.0f - ty.frac) + bottom * ty.frac, 0.0f, 1.0f);
      }
    }
  }
  return out;
}

CropRect center_square(int height, int width) noexcept {
  const int side = std::min(height, width);
  return {(height - side) / 2, (width - side) / 2, side, side};
}

RasterImage standardize_image(const RasterImage& image, int side, Interpolation mode) {
  if (side < 1) throw InvalidArgument("standardize side must be >= 1");
  const CropRect square = center_square(image.height(), image.width());
  if (square.height == image.height() && square.width == image.width()) {
    return resize(image, side, side, mode);
  }
  return resize(crop(image, square), side, side, mode);
}

RasterImage flip_horizontal(const RasterImage& image) {
  RasterImage out(image.height(), image.width(), image.channels());
  const int w = image.width();
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < image.channels(); ++c) out.at(y, w - 1 - x, c) = image.at(y, x, c);
    }
  }
  return out;
}

void paste(RasterImage& dst, const RasterImage& src, int top, int left) {
  if (src.channels() != dst.channels()) throw InvalidArgument("paste: channel mismatch");
  const CropRect target{top, left, src.height(), src.width()};
  if (!target.inside(dst.height(), dst.width())) {
    throw InvalidArgument("paste: source does not fit at the requested position");
  }
  const int c = src.channels();
  for (int y = 0; y < src.height(); ++y) {
    const float* row = &src.pixels()[static_cast<std::size_t>(y) * src.width() * c];
    std::copy(row, row + static_cast<std::size_t>(src.width()) * c, &dst.at(top + y, left, 0));
  }
}

}  // namespace dscomp
