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

// Shared test helpers.

#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "dscomp/dataset.hpp"
#include "dscomp/image.hpp"
#include "dscomp/random.hpp"

namespace dscomp::testing {

/// Directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("dscomp_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline RasterImage random_image(int h, int w, int c, std::uint64_t seed) {
  RandomStream rs(seed);
  RasterImage img(h, w, c);
  for (auto& v : img.pixels()) v = static_cast<float>(rs.uniform());
  return img;
}

/// Every pixel encodes its own position, so nearest-neighbour outputs can be
/// traced back to a source pixel. Values stay inside [0, 1].
inline RasterImage coordinate_image(int h, int w) {
  RasterImage img(h, w, 1);
  const float n = static_cast<float>(h * w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img.at(y, x, 0) = static_cast<float>(y * w + x) / n;
  }
  return img;
}

inline int decode_coordinate(float v, int h, int w) {
  return static_cast<int>(std::lround(static_cast<double>(v) * h * w));
}

}  // namespace dscomp::testing
