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

// Combine stage: tiles k x k whole, standardized images of one class into a
// single composite. Nothing is cropped away beyond standardization.

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dscomp/dataset.hpp"
#include "dscomp/pruner.hpp"

namespace dscomp {

struct GridSpec {
  int k = 2;
  int cell_side = 16;

  int side() const noexcept { return k * cell_side; }
  int cells() const noexcept { return k * k; }
  void validate() const;
};

struct CellRecord {
  SampleId source_id = 0;
  int row = 0;
  int col = 0;

  bool operator==(const CellRecord&) const = default;
};

struct CompositeImage {
  RasterImage image;
  /// Row-major: cells[row * k + col].
  std::vector<CellRecord> cells;
  int label = 0;
  GridSpec grid;

  CropRect cell_rect(int row, int col) const noexcept {
    return {row * grid.cell_side, col * grid.cell_side, grid.cell_side, grid.cell_side};
  }
};

/// `sources` must hold exactly k^2 samples sharing one label.
CompositeImage combine(std::span<const LabeledSample> sources, const GridSpec& grid,
                       Interpolation mode = Interpolation::bilinear);

RasterImage extract_cell(const CompositeImage& composite, int row, int col);

struct CompressedDataset {
  /// Class-major; ipc_out composites per class.
  std::vector<CompositeImage> items;
  int num_classes = 0;
  GridSpec grid;
  std::string provenance;

  /// Composites as a training set. Each takes the sample_id of its first
  /// source, so ids stay unique and inside the training id range.
  DatasetView as_view() const;
};

/// Per class, the selected samples (in subset order) are chunked into
/// consecutive blocks of k^2 and each block becomes one composite.
CompressedDataset build_compressed_dataset(const DatasetView& dataset,
                                           const SubsetIndices& subset, const GridSpec& grid,
                                           int ipc_out,
                                           Interpolation mode = Interpolation::bilinear);

struct StorageReport {
  std::size_t images = 0;
  std::size_t source_images = 0;
  std::size_t payload_bytes = 0;
  std::size_t header_bytes = 0;
  std::size_t manifest_bytes = 0;
  /// Everything write_compressed_dataset puts on disk.
  std::size_t total_bytes = 0;
  std::size_t composite_pixels = 0;
  /// Sources stored separately at cell resolution (always equals composite_pixels).
  std::size_t cell_resolution_pixels = 0;
  /// Sources stored separately at the composite resolution.
  std::size_t full_resolution_pixels = 0;

  double cell_pixel_ratio() const noexcept {
    return cell_resolution_pixels ? double(composite_pixels) / double(cell_resolution_pixels) : 0.0;
  }
  double full_pixel_ratio() const noexcept {
    return full_resolution_pixels ? double(composite_pixels) / double(full_resolution_pixels) : 0.0;
  }
};

/// Byte accounting: one rank-3 DCT1 container per composite plus the manifest.
StorageReport storage_report(const CompressedDataset& dataset);

/// File name of each composite, in item order.
std::vector<std::string> composite_file_names(const CompressedDataset& dataset);
/// manifest.csv contents.
std::string render_manifest(const CompressedDataset& dataset);

/// Writes `class<label>_<index>.dct` per composite and `manifest.csv`.
/// Returns the number of bytes written.
std::size_t write_compressed_dataset(const CompressedDataset& dataset,
                                     const std::filesystem::path& dir);
CompressedDataset read_compressed_dataset(const std::filesystem::path& dir);

/// Column header of manifest.csv; no per-sample probabilities are ever stored.
inline constexpr const char* kManifestColumns = "file,label,row,col,source_id";

}  // namespace dscomp
