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

#include "dscomp/random.hpp"

#include <cassert>
#include <cmath>

namespace dscomp {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_tag(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t root_seed, std::string_view tag,
                          std::uint64_t id) noexcept {
  std::uint64_t h = mix64(root_seed);
  h = mix64(h ^ hash_tag(tag));
  h = mix64(h ^ id);
  return h;
}

double RandomStream::uniform() {
  // 53 random mantissa bits; identical on every platform for a given engine state.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::size_t RandomStream::index(std::size_t n) {
  assert(n > 0);
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

int RandomStream::integer(int lo, int hi) {
  assert(lo <= hi);
  std::uniform_int_distribution<int> dist(lo, hi);
  return dist(engine_);
}

double RandomStream::normal(double mean, double stddev) {
  std::normal_distribution<double> dist(mean, stddev);
  return dist(engine_);
}

bool RandomStream::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform() < p;
}

double RandomStream::beta(double a, double b) {
  if (a == 1.0 && b == 1.0) return uniform();
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(engine_);
  const double y = gb(engine_);
  return (x + y) > 0.0 ? x / (x + y) : 0.5;
}

}  // namespace dscomp
