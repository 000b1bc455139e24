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

// DCT1 tensor container.
//
//   bytes 0-3   magic "DCT1"
//   u8          rank (3 for one H,W,C image; 4 for an N,H,W,C batch)
//   rank x u32  dims, little-endian
//   u8          dtype code (0 = f32)
//   payload     row-major f32, little-endian

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "dscomp/image.hpp"

namespace dscomp {

using ImageBatch = std::vector<RasterImage>;
using TensorContents = std::variant<RasterImage, ImageBatch>;

inline constexpr std::uint8_t kDtypeF32 = 0;

/// Header size in bytes for a container of the given rank.
constexpr std::size_t container_header_bytes(std::size_t rank) noexcept {
  return 4 + 1 + 4 * rank + 1;
}

void write_tensor_container(std::ostream& out, const RasterImage& image);
/// All images must share one shape; an empty batch is rejected.
void write_tensor_container(std::ostream& out, std::span<const RasterImage> batch);
TensorContents read_tensor_container(std::istream& in);

void save_tensor_container(const RasterImage& image, const std::filesystem::path& path);
void save_tensor_container(std::span<const RasterImage> batch, const std::filesystem::path& path);
TensorContents load_tensor_container(const std::filesystem::path& path);

/// Loads a rank-3 file as one image; throws FormatError on a batch.
RasterImage load_image(const std::filesystem::path& path);
/// Loads a rank-4 file; a rank-3 file becomes a batch of one.
ImageBatch load_batch(const std::filesystem::path& path);

/// 8-bit binary PPM (P6). Grey images are written with R=G=B.
void write_ppm(const RasterImage& image, const std::filesystem::path& path);

}  // namespace dscomp
