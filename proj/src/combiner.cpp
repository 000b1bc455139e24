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

#include "dscomp/combiner.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "dscomp/error.hpp"
#include "dscomp/tensor_io.hpp"

namespace dscomp {

void GridSpec::validate() const {
  if (k < 1) throw InvalidArgument("grid k must be >= 1");
  if (cell_side < 1) throw InvalidArgument("grid cell_side must be >= 1");
}

CompositeImage combine(std::span<const LabeledSample> sources, const GridSpec& grid,
                       Interpolation mode) {
  grid.validate();
  if (sources.size() != static_cast<std::size_t>(grid.cells())) {
    throw InvalidArgument(fmt::format("combine needs {} images for k={}, got {}", grid.cells(),
                                      grid.k, sources.size()));
  }
  const int label = sources.front().label;
  const int channels = sources.front().image.channels();
  for (const auto& s : sources) {
    if (s.label != label) {
      throw InvalidArgument(fmt::format("combine: label mismatch ({} vs {}) for sample {}",
                                        s.label, label, s.sample_id));
    }
    if (s.image.channels() != channels) throw InvalidArgument("combine: channel mismatch");
  }

  CompositeImage out;
  out.grid = grid;
  out.label = label;
  out.image = RasterImage(grid.side(), grid.side(), channels);
  for (int r = 0; r < grid.k; ++r) {
    for (int c = 0; c < grid.k; ++c) {
      const auto& src = sources[static_cast<std::size_t>(r * grid.k + c)];
      paste(out.image, standardize_image(src.image, grid.cell_side, mode), r * grid.cell_side,
            c * grid.cell_side);
      out.cells.push_back({src.sample_id, r, c});
    }
  }
  return out;
}

RasterImage extract_cell(const CompositeImage& composite, int row, int col) {
  if (row < 0 || col < 0 || row >= composite.grid.k || col >= composite.grid.k) {
    throw InvalidArgument("cell index outside grid");
  }
  return crop(composite.image, composite.cell_rect(row, col));
}

DatasetView CompressedDataset::as_view() const {
  DatasetView view;
  view.num_classes = num_classes;
  view.name = "compressed";
  view.samples.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    view.samples.push_back({items[i].image, items[i].label, items[i].cells.front().source_id});
  }
  return view;
}

CompressedDataset build_compressed_dataset(const DatasetView& dataset,
                                           const SubsetIndices& subset, const GridSpec& grid,
                                           int ipc_out, Interpolation mode) {
  grid.validate();
  if (ipc_out < 1) throw InvalidArgument("ipc_out must be >= 1");
  std::unordered_map<SampleId, const LabeledSample*> by_id;
  for (const auto& s : dataset.samples) by_id[s.sample_id] = &s;

  std::map<int, std::vector<LabeledSample>> per_class;
  for (SampleId id : subset.ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw LookupError("subset id " + std::to_string(id) + " not in dataset");
    per_class[it->second->label].push_back(*it->second);
  }

  const std::size_t need = static_cast<std::size_t>(ipc_out) * grid.cells();
  CompressedDataset out;
  out.num_classes = dataset.num_classes;
  out.grid = grid;
  out.provenance = fmt::format("k={} cell_side={} ipc_out={} <- {}", grid.k, grid.cell_side,
                               ipc_out, subset.provenance);
  for (int c = 0; c < dataset.num_classes; ++c) {
    const auto& members = per_class[c];
    if (members.size() != need) {
      throw InvalidArgument(fmt::format(
          "class {} has {} selected samples; ipc_out={} with k={} requires exactly {}", c,
          members.size(), ipc_out, grid.k, need));
    }
    for (int b = 0; b < ipc_out; ++b) {
      const std::span<const LabeledSample> block(members.data() + b * grid.cells(),
                                                 static_cast<std::size_t>(grid.cells()));
      out.items.push_back(combine(block, grid, mode));
    }
  }
  return out;
}

std::vector<std::string> composite_file_names(const CompressedDataset& dataset) {
  std::map<int, int> next_index;
  std::vector<std::string> names;
  names.reserve(dataset.items.size());
  for (const auto& item : dataset.items) {
    names.push_back(fmt::format("class{}_{}.dct", item.label, next_index[item.label]++));
  }
  return names;
}

std::string render_manifest(const CompressedDataset& dataset) {
  std::string text = fmt::format("# dscomp compressed dataset k={} cell_side={} num_classes={} "
                                 "provenance={}\n",
                                 dataset.grid.k, dataset.grid.cell_side, dataset.num_classes,
                                 dataset.provenance);
  text += kManifestColumns;
  text += "\n";
  const auto names = composite_file_names(dataset);
  for (std::size_t i = 0; i < dataset.items.size(); ++i) {
    const auto& item = dataset.items[i];
    for (const auto& cell : item.cells) {
      text += fmt::format("{},{},{},{},{}\n", names[i], item.label, cell.row, cell.col,
                          cell.source_id);
    }
  }
  return text;
}

StorageReport storage_report(const CompressedDataset& dataset) {
  StorageReport r;
  for (const auto& item : dataset.items) {
    ++r.images;
    r.source_images += item.cells.size();
    r.payload_bytes += item.image.size() * sizeof(float);
    r.header_bytes += container_header_bytes(3);
    r.composite_pixels += static_cast<std::size_t>(item.image.height()) * item.image.width();
    const auto cell = static_cast<std::size_t>(item.grid.cell_side);
    const auto side = static_cast<std::size_t>(item.grid.side());
    r.cell_resolution_pixels += item.cells.size() * cell * cell;
    r.full_resolution_pixels += item.cells.size() * side * side;
  }
  r.manifest_bytes = render_manifest(dataset).size();
  r.total_bytes = r.payload_bytes + r.header_bytes + r.manifest_bytes;
  return r;
}

std::size_t write_compressed_dataset(const CompressedDataset& dataset,
                                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto names = composite_file_names(dataset);
  std::size_t bytes = 0;
  for (std::size_t i = 0; i < dataset.items.size(); ++i) {
    save_tensor_container(dataset.items[i].image, dir / names[i]);
    bytes += std::filesystem::file_size(dir / names[i]);
  }
  std::ofstream out(dir / "manifest.csv", std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write manifest in " + dir.string());
  const std::string text = render_manifest(dataset);
  out << text;
  return bytes + text.size();
}

CompressedDataset read_compressed_dataset(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.csv");
  if (!in) throw Error("cannot read manifest in " + dir.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("# dscomp compressed dataset", 0) != 0) {
    throw FormatError("manifest", "missing header line");
  }
  CompressedDataset ds;
  {
    auto field = [&](const std::string& key) -> std::string {
      const auto pos = line.find(" " + key + "=");
      if (pos == std::string::npos) throw FormatError("manifest", "missing " + key);
      const auto start = pos + key.size() + 2;
      if (key == "provenance") return line.substr(start);
      return line.substr(start, line.find(' ', start) - start);
    };
    ds.grid.k = std::stoi(field("k"));
    ds.grid.cell_side = std::stoi(field("cell_side"));
    ds.num_classes = std::stoi(field("num_classes"));
    ds.provenance = field("provenance");
  }
  if (!std::getline(in, line) || line != kManifestColumns) {
    throw FormatError("manifest", std::string("expected columns '") + kManifestColumns + "'");
  }
  std::string current;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string file, label, row, col, source;
    if (!std::getline(fields, file, ',') || !std::getline(fields, label, ',') ||
        !std::getline(fields, row, ',') || !std::getline(fields, col, ',') ||
        !std::getline(fields, source)) {
      throw FormatError("manifest", "malformed row: " + line);
    }
    if (file != current) {
      CompositeImage item;
      item.image = load_image(dir / file);
      item.label = std::stoi(label);
      item.grid = ds.grid;
      ds.items.push_back(std::move(item));
      current = file;
    }
    ds.items.back().cells.push_back({std::stoull(source), std::stoi(row), std::stoi(col)});
  }
  return ds;
}

}  // namespace dscomp
