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
#include <cstdint>
#include <random>
#include <string_view>

namespace dscomp {

/// 64-bit finalizer from SplitMix64. Bijective, so distinct inputs never collide.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// FNV-1a over the bytes of `text`.
std::uint64_t hash_tag(std::string_view text) noexcept;

/// Child stream seed = hash(root_seed, component tag, id).
///
/// Streams are keyed only by these three values, never by call order, so a
/// per-sample transform gives the same result whether a batch is processed
/// serially, in parallel, or in a different order.
std::uint64_t derive_seed(std::uint64_t root_seed, std::string_view tag,
                          std::uint64_t id) noexcept;

struct SeedSpec {
  std::uint64_t root_seed = 0;

  std::uint64_t child(std::string_view tag, std::uint64_t id) const noexcept {
    return derive_seed(root_seed, tag, id);
  }
};

/// A seeded random stream. Copyable; copies replay the same sequence.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

  static RandomStream derive(std::uint64_t root_seed, std::string_view tag,
                             std::uint64_t id) {
    return RandomStream(derive_seed(root_seed, tag, id));
  }

  /// Independent sub-stream; does not advance this stream.
  RandomStream child(std::string_view tag, std::uint64_t id) const {
    return derive(seed_, tag, id);
  }

  std::uint64_t seed() const noexcept { return seed_; }

  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n). Requires n > 0.
  std::size_t index(std::size_t n);
  /// Uniform integer in [lo, hi] inclusive.
  int integer(int lo, int hi);
  double normal(double mean = 0.0, double stddev = 1.0);
  bool bernoulli(double p);
  /// Beta(a, b) via two gamma draws.
  double beta(double a, double b);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace dscomp
