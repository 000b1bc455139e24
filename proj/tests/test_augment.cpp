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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "doctest.h"
#include "dscomp/augment.hpp"
#include "dscomp/error.hpp"
#include "support.hpp"

using namespace dscomp;
using namespace dscomp::testing;

namespace {

RasterImage quadrants(int cell) {
  RasterImage img(2 * cell, 2 * cell, 1);
  const float v[4] = {0.1f, 0.2f, 0.3f, 0.4f};
  for (int y = 0; y < 2 * cell; ++y) {
    for (int x = 0; x < 2 * cell; ++x) img.at(y, x, 0) = v[(y / cell) * 2 + x / cell];
  }
  return img;
}

double weight_sum(const std::vector<double>& w) { return std::accumulate(w.begin(), w.end(), 0.0); }

int nonzero(const std::vector<double>& w) {
  return static_cast<int>(std::count_if(w.begin(), w.end(), [](double v) { return v != 0.0; }));
}

// Expected clipped extent of a length-b segment whose centre is a uniform
// integer in [0, S-1], starting at centre - b/2.
double expected_extent(int S, int b) {
  double total = 0.0;
  for (int c = 0; c < S; ++c) {
    const int lo = std::max(0, c - b / 2);
    const int hi = std::min(S, c - b / 2 + b);
    total += hi - lo;
  }
  return total / S;
}

}  // namespace

TEST_CASE("full-range crop with fixed aspect is a plain resize") {
  const RasterImage img = random_image(12, 12, 3, 1);
  CropSpec spec;
  spec.r_min = spec.r_max = 1.0;
  spec.aspect_min = spec.aspect_max = 1.0;
  spec.out_side = 12;
  RandomStream rs(3);
  const CropResult r = random_resized_crop(img, spec, rs);
  CHECK_FALSE(r.draw.fallback);
  CHECK(r.image == img);
}

TEST_CASE("crop rectangles stay inside and cover the area range") {
  RandomStream rs(17);
  CropSpec spec;
  double lo = 1.0, hi = 0.0;
  int below = 0, above = 0, fallbacks = 0;
  for (int i = 0; i < 10000; ++i) {
    const int h = rs.integer(8, 64), w = rs.integer(8, 64);
    const CropDraw d = sample_crop_rect(h, w, spec, rs);
    REQUIRE(d.rect.inside(h, w));
    if (d.fallback) {
      ++fallbacks;
      CHECK(d.rect == center_square(h, w));
      continue;
    }
    const double frac = double(d.rect.area()) / (double(h) * w);
    // Rounding each side by at most half a pixel.
    const double eps = (0.5 * (d.rect.height + d.rect.width) + 0.25) / (double(h) * w);
    CHECK(frac >= spec.r_min - eps);
    CHECK(frac <= spec.r_max + eps);
    lo = std::min(lo, frac);
    hi = std::max(hi, frac);
    below += frac < 0.2;
    above += frac > 0.8;
  }
  CHECK(below > 0);
  CHECK(above > 0);
  CHECK(fallbacks < 1000);
}

TEST_CASE("impossible crop falls back to the centred square") {
  CropSpec spec;
  spec.r_min = spec.r_max = 1.0;
  spec.aspect_min = spec.aspect_max = 4.0;  // too wide to fit the full area
  RandomStream rs(1);
  const CropDraw d = sample_crop_rect(10, 6, spec, rs);
  CHECK(d.fallback);
  CHECK(d.rect == CropRect{2, 0, 6, 6});
}

TEST_CASE("crop spec validation") {
  CropSpec spec;
  spec.r_min = 0.0;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec = CropSpec{};
  spec.r_min = 0.9;
  spec.r_max = 0.5;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  CHECK_NOTHROW(CropSpec::square(0.08, 32).validate());
}

TEST_CASE("patch extraction") {
  RandomStream rs(4);
  const RasterImage one = random_image(8, 8, 1, 2);
  for (int i = 0; i < 10; ++i) CHECK(patch_extract(one, 1, rs).image == one);

  const RasterImage comp = quadrants(4);
  std::map<float, int> freq;
  for (int i = 0; i < 10000; ++i) {
    const PatchChoice p = patch_extract(comp, 2, rs);
    const float v = p.image.at(0, 0, 0);
    for (float px : p.image.pixels()) REQUIRE(px == v);
    CHECK(v == comp.at(p.row * 4, p.col * 4, 0));
    ++freq[v];
  }
  REQUIRE(freq.size() == 4);
  for (const auto& [v, n] : freq) CHECK(std::abs(n / 10000.0 - 0.25) <= 0.02);
  CHECK_THROWS_AS(patch_extract(random_image(9, 9, 1, 1), 2, rs), InvalidArgument);
}

TEST_CASE("extract then crop never leaves the chosen cell") {
  RandomStream rs(9);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = rs.integer(1, 4), cell = rs.integer(3, 9);
    const int side = k * cell;
    const RasterImage comp = coordinate_image(side, side);
    PipelineConfig cfg = PipelineConfig::pca_default(k, rs.integer(4, 20));
    cfg.interpolation = Interpolation::nearest;
    cfg.crop.r_min = rs.uniform(0.01, 1.0);
    RandomStream stream = RandomStream::derive(5, "trial", trial);
    RandomStream probe = stream;
    const int index = k == 1 ? 0 : int(probe.index(std::size_t(k) * k));
    const int row = index / k, col = index % k;
    const GeometricOutput out = apply_geometric(comp, cfg, stream);
    for (float v : out.image.pixels()) {
      const int pos = decode_coordinate(v, side, side);
      CHECK(pos / side / cell == row);
      CHECK(pos % side / cell == col);
    }
  }
}

TEST_CASE("patch shuffle is a uniform permutation") {
  RandomStream rs(10);
  const RasterImage comp = quadrants(3);
  std::map<std::vector<int>, int> freq;
  for (int i = 0; i < 10000; ++i) {
    std::vector<int> perm;
    const RasterImage out = patch_shuffle(comp, 2, rs, &perm);
    for (int dst = 0; dst < 4; ++dst) {
      const int src = perm[dst];
      CHECK(out.at((dst / 2) * 3, (dst % 2) * 3, 0) == comp.at((src / 2) * 3, (src % 2) * 3, 0));
    }
    std::vector<float> a(out.pixels().begin(), out.pixels().end());
    std::vector<float> b(comp.pixels().begin(), comp.pixels().end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    ++freq[perm];
  }
  CHECK(freq.size() == 24);
  for (const auto& [perm, n] : freq) CHECK(std::abs(n / 10000.0 - 1.0 / 24) <= 0.01);
  const RasterImage one = random_image(5, 5, 3, 1);
  CHECK(patch_shuffle(one, 1, rs) == one);
}

TEST_CASE("flip rate") {
  RandomStream rs(11);
  const RasterImage img = random_image(3, 4, 1, 1);
  int flips = 0;
  for (int i = 0; i < 10000; ++i) {
    bool flipped = false;
    const RasterImage out = horizontal_flip(img, rs, 0.5, &flipped);
    CHECK(out == (flipped ? flip_horizontal(img) : img));
    flips += flipped;
  }
  CHECK(std::abs(flips / 10000.0 - 0.5) <= 0.02);
  bool flipped = true;
  horizontal_flip(img, rs, 0.0, &flipped);
  CHECK_FALSE(flipped);
}

TEST_CASE("cutout geometry") {
  RandomStream rs(12);
  const RasterImage img(16, 16, 3, 0.7f);
  MixSpec spec;
  spec.kind = MixKind::cutout;
  for (int i = 0; i < 500; ++i) {
    RandomStream copy = rs;
    const CropRect box = sample_cutout_box(16, 16, 0.5, copy);
    const RasterImage out = cutout(img, spec, rs);
    int zeroed = 0;
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 16; ++x) {
        const bool inside = y >= box.top && y < box.top + box.height && x >= box.left &&
                            x < box.left + box.width;
        for (int c = 0; c < 3; ++c) CHECK(out.at(y, x, c) == (inside ? 0.0f : 0.7f));
        zeroed += inside;
      }
    }
    CHECK(zeroed > 0);
    CHECK(zeroed <= 8 * 8);
  }
}

TEST_CASE("expected cutout area matches the clipped-square expectation") {
  for (int S : {16, 17, 32}) {
    const int b = int(std::lround(0.5 * S));
    const double expect = expected_extent(S, b) * expected_extent(S, b);
    RandomStream rs(S);
    double total = 0.0;
    for (int i = 0; i < 10000; ++i) total += double(sample_cutout_box(S, S, 0.5, rs).area());
    CHECK(std::abs(total / 10000 - expect) / expect <= 0.02);
  }
}

TEST_CASE("mixup") {
  const RasterImage a(4, 4, 1, 0.2f), b(4, 4, 1, 0.6f);
  const AugmentedSample end = mixup_blend(a, 0, b, 1, 3, 1.0, true);
  CHECK(end.image == a);
  CHECK(end.label_weights == std::vector<double>{1.0, 0.0, 0.0});
  const AugmentedSample half = mixup_blend(a, 0, b, 1, 3, 0.5, true);
  for (float v : half.image.pixels()) CHECK(v == doctest::Approx(0.4f));
  CHECK(half.label_weights == std::vector<double>{0.5, 0.5, 0.0});
  CHECK(mixup_blend(a, 0, b, 1, 3, 0.5, false).label_weights == std::vector<double>{1, 0, 0});
  CHECK_THROWS_AS(mixup_blend(a, 0, RasterImage(4, 5, 1), 1, 3, 0.5, true), InvalidArgument);

  RandomStream rs(13);
  MixSpec spec;
  spec.kind = MixKind::mixup;
  spec.label_mixing = true;
  for (int i = 0; i < 200; ++i) {
    const AugmentedSample s = mixup(a, 2, b, 0, 3, spec, rs);
    CHECK(weight_sum(s.label_weights) == doctest::Approx(1.0).epsilon(1e-12));
    const double lambda = s.label_weights[2];
    CHECK(s.image.at(0, 0, 0) == doctest::Approx(lambda * 0.2 + (1 - lambda) * 0.6).epsilon(1e-5));
  }
}

TEST_CASE("cutmix pixel provenance") {
  const RasterImage a(6, 6, 1, 0.25f), b(6, 6, 1, 0.75f);
  const AugmentedSample none = cutmix_paste(a, 0, b, 1, 2, CropRect{0, 0, 0, 0}, true);
  CHECK(none.image == a);
  CHECK(none.label_weights == std::vector<double>{1.0, 0.0});
  const AugmentedSample all = cutmix_paste(a, 0, b, 1, 2, CropRect{0, 0, 6, 6}, true);
  CHECK(all.image == b);
  CHECK(all.label_weights == std::vector<double>{0.0, 1.0});

  RandomStream rs(14);
  MixSpec spec;
  spec.kind = MixKind::cutmix;
  spec.label_mixing = true;
  const RasterImage p = random_image(20, 20, 3, 1), q = coordinate_image(20, 20);
  RasterImage q3(20, 20, 3);
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) {
      for (int c = 0; c < 3; ++c) q3.at(y, x, c) = q.at(y, x, 0);
    }
  }
  for (int i = 0; i < 500; ++i) {
    const AugmentedSample s = cutmix(p, 1, q3, 0, 2, spec, rs);
    int from_b = 0;
    for (int y = 0; y < 20; ++y) {
      for (int x = 0; x < 20; ++x) {
        if (s.image.at(y, x, 0) == q3.at(y, x, 0) && s.image.at(y, x, 1) == q3.at(y, x, 1) &&
            s.image.at(y, x, 2) == q3.at(y, x, 2) && !(p.at(y, x, 0) == q3.at(y, x, 0))) {
          ++from_b;
        }
      }
    }
    CHECK(s.label_weights[1] == doctest::Approx(1.0 - from_b / 400.0).epsilon(1e-12));
    CHECK(weight_sum(s.label_weights) == doctest::Approx(1.0));
  }
}

TEST_CASE("pipeline contracts") {
  const RasterImage img = random_image(8, 8, 3, 3);
  RandomStream rs(15);
  const AugmentedSample id = apply_pipeline(img, 1, 3, PipelineConfig::identity(8), rs);
  CHECK(id.image == img);
  CHECK(id.label_weights == std::vector<double>{0, 1, 0});

  const RasterImage comp = random_image(32, 32, 3, 4);
  for (int i = 0; i < 50; ++i) {
    const AugmentedSample s = apply_pipeline(comp, 2, 3, PipelineConfig::pca_default(2, 24), rs);
    CHECK(s.image.height() == 24);
    CHECK(s.image.width() == 24);
    CHECK(nonzero(s.label_weights) == 1);
    CHECK_NOTHROW(s.image.validate());
  }

  PipelineConfig mix = PipelineConfig::crop_flip(16);
  mix.mix.kind = MixKind::cutmix;
  mix.mix.probability = 1.0;
  mix.mix.label_mixing = true;
  const RasterImage other = random_image(16, 16, 3, 5);
  for (int i = 0; i < 50; ++i) {
    const AugmentedSample s = apply_pipeline(random_image(16, 16, 3, i), 0, 4, mix, rs,
                                             MixPartner{&other, 3});
    CHECK(nonzero(s.label_weights) <= 2);
    CHECK(weight_sum(s.label_weights) == doctest::Approx(1.0));
  }
}

TEST_CASE("pipeline determinism and batch partners") {
  const DatasetView ds = generate_synthetic_dataset(3, 4, 16, 2);
  std::vector<const RasterImage*> inputs;
  std::vector<int> labels;
  for (const auto& s : ds.samples) {
    inputs.push_back(&s.image);
    labels.push_back(s.label);
  }
  PipelineConfig cfg = PipelineConfig::crop_flip(12);
  cfg.mix.kind = MixKind::mixup;
  cfg.mix.probability = 0.5;
  cfg.mix.label_mixing = true;
  auto run = [&] {
    std::vector<RandomStream> streams;
    for (std::size_t i = 0; i < inputs.size(); ++i) streams.push_back(RandomStream::derive(1, "s", i));
    return augment_batch(inputs, labels, 3, cfg, streams);
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.size() == inputs.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].image == b[i].image);
    CHECK(a[i].label_weights == b[i].label_weights);
    CHECK(weight_sum(a[i].label_weights) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_NOTHROW(a[i].image.validate());
  }

  // The geometric stages of one sample do not depend on its batch mates.
  RandomStream solo = RandomStream::derive(1, "s", 0);
  const GeometricOutput g = apply_geometric(*inputs[0], cfg, solo);
  if (!g.mix) CHECK(g.image == a[0].image);

  std::vector<RandomStream> short_streams(2, RandomStream(0));
  CHECK_THROWS_AS(augment_batch(inputs, labels, 3, cfg, short_streams), InvalidArgument);
}

TEST_CASE("mix spec and names") {
  MixSpec spec;
  spec.probability = 1.5;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec = MixSpec{};
  spec.cutout_fraction = 0.0;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  for (MixKind k : {MixKind::none, MixKind::cutout, MixKind::mixup, MixKind::cutmix}) {
    CHECK(parse_mix_kind(to_string(k)) == k);
  }
  for (PatchMode m : {PatchMode::none, PatchMode::extract, PatchMode::shuffle}) {
    CHECK(parse_patch_mode(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_mix_kind("blend"), InvalidArgument);
}
