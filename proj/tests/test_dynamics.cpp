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

#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "dscomp/dynamics.hpp"
#include "dscomp/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace dscomp;
using namespace dscomp::testing;


TEST_CASE("epoch record from logits") {
  const std::vector<float> z = {1.0f, 3.0f, 2.0f};
  const EpochRecord r = make_epoch_record(z, 2);
  CHECK_FALSE(r.correct);
  CHECK(r.margin == doctest::Approx(-1.0));
  const EpochRecord s = make_epoch_record(z, 1);
  CHECK(s.correct);
  CHECK(s.margin == doctest::Approx(1.0));
  // A tie is resolved to the lowest class.
  const std::vector<float> tie = {2.0f, 2.0f};
  CHECK(make_epoch_record(tie, 0).correct);
  CHECK_FALSE(make_epoch_record(tie, 1).correct);
}

TEST_CASE("closed forms") {
  // Uniform prediction over C classes: ||p - e_y|| = sqrt((1-1/C)^2 + (C-1)/C^2).
  for (int C : {2, 3, 10}) {
    const std::vector<float> z(C, 0.0f);
    RawLog raw{{1}, {0}, {{z}}, C};
    const DynamicsLog log = to_log(raw);
    const double expect = std::sqrt((1.0 - 1.0 / C) * (1.0 - 1.0 / C) + (C - 1.0) / (C * C));
    CHECK(el2n(log, 1, 1) == doctest::Approx(expect).epsilon(1e-9));
    CHECK(aum(log, 1) == 0.0);
  }
  // correct, wrong, correct, wrong: two forgetting events.
  const std::vector<float> good = {2.0f, 0.0f}, bad = {0.0f, 2.0f};
  RawLog raw{{5}, {0}, {{good}, {bad}, {good}, {bad}}, 2};
  const DynamicsLog log = to_log(raw);
  CHECK(forgetting(log, 5) == 2);
  CHECK(aum(log, 5) == doctest::Approx(0.0));
  CHECK_THROWS_AS(el2n(log, 5, 5), InvalidArgument);
  CHECK_THROWS_AS(el2n(log, 5, 0), InvalidArgument);
  CHECK_THROWS_AS(aum(log, 6), LookupError);
}

TEST_CASE("metrics match brute force on fuzzed logs") {
  RandomStream rs(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rs.integer(1, 12), epochs = rs.integer(1, 9), classes = rs.integer(2, 5);
    const RawLog raw = fuzz_log(rs, n, epochs, classes);
    const DynamicsLog log = to_log(raw);
    const int window = rs.integer(1, epochs);
    const ScoreTable table = build_score_table(log, window);
    REQUIRE(table.rows.size() == std::size_t(n));
    for (int i = 0; i < n; ++i) {
      const ScoreRow& r = table.rows[i];
      CHECK(r.sample_id == raw.ids[i]);
      CHECK(r.label == raw.labels[i]);
      CHECK(r.el2n == doctest::Approx(brute_el2n(raw, i, window)).epsilon(1e-9));
      CHECK(r.forgetting == brute_forgetting(raw, i));
      CHECK(r.aum == doctest::Approx(brute_aum(raw, i)).epsilon(1e-9));
      CHECK(r.el2n >= 0.0);
      CHECK(r.el2n <= std::sqrt(2.0) + 1e-12);
      CHECK(r.forgetting <= epochs / 2);
    }
  }
}

TEST_CASE("AUM and EL2N are invariant to a common logit shift") {
  RandomStream rs(8);
  RawLog raw = fuzz_log(rs, 6, 5, 4);
  const ScoreTable base = build_score_table(to_log(raw), 3);
  for (auto& e : raw.logits) {
    for (auto& z : e) {
      for (auto& v : z) v += 4.0f;
    }
  }
  const ScoreTable shifted = build_score_table(to_log(raw), 3);
  for (std::size_t i = 0; i < base.rows.size(); ++i) {
    CHECK(shifted.rows[i].aum == doctest::Approx(base.rows[i].aum).epsilon(1e-5));
    CHECK(shifted.rows[i].el2n == doctest::Approx(base.rows[i].el2n).epsilon(1e-5));
    CHECK(shifted.rows[i].forgetting == base.rows[i].forgetting);
  }
}

TEST_CASE("log construction checks") {
  CHECK_THROWS_AS(DynamicsLog({1, 1}, {0, 0}, 2), InvalidArgument);
  CHECK_THROWS_AS(DynamicsLog({1, 2}, {0}, 2), InvalidArgument);
  DynamicsLog log({1, 2}, {0, 1}, 2);
  CHECK_THROWS_AS(log.append_epoch({}), InvalidArgument);
  CHECK(log.index_of(2) == 1);
  CHECK_THROWS_AS(log.index_of(3), LookupError);
}

TEST_CASE("score table round-trip at nine significant digits") {
  RandomStream rs(4);
  const ScoreTable table = build_score_table(to_log(fuzz_log(rs, 20, 6, 3)), 4);
  std::stringstream buf;
  write_scores(buf, table);
  const ScoreTable back = read_scores(buf);
  REQUIRE(back.rows.size() == table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    CHECK(back.rows[i].sample_id == table.rows[i].sample_id);
    CHECK(back.rows[i].label == table.rows[i].label);
    CHECK(back.rows[i].forgetting == table.rows[i].forgetting);
    CHECK(std::abs(back.rows[i].el2n - table.rows[i].el2n) <=
          1e-8 * std::max(1.0, std::abs(table.rows[i].el2n)));
    CHECK(std::abs(back.rows[i].aum - table.rows[i].aum) <=
          1e-8 * std::max(1.0, std::abs(table.rows[i].aum)));
  }
  // Writing the parsed table again is a fixed point.
  std::stringstream again;
  write_scores(again, back);
  std::stringstream first;
  write_scores(first, table);
  CHECK(again.str() == first.str());

  TempDir dir("scores");
  save_scores(table, dir / "s.csv");
  CHECK(load_scores(dir / "s.csv") == back);
}

TEST_CASE("malformed score files") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_scores(in);
  };
  CHECK_THROWS_AS(parse(""), FormatError);
  CHECK_THROWS_AS(parse("id,label\n"), FormatError);
  CHECK_THROWS_AS(parse("sample_id,label,el2n,forgetting,aum\n1,0,0.5,1\n"), FormatError);
  CHECK_THROWS_AS(parse("sample_id,label,el2n,forgetting,aum\n1,0,x,1,0\n"), FormatError);
  CHECK_THROWS_AS(parse("sample_id,label,el2n,forgetting,aum\n1,0,0.1,1,0,9\n"), FormatError);
  CHECK(parse("sample_id,label,el2n,forgetting,aum\n1,0,0.1,1,-0.5\n").rows.size() == 1);
}

TEST_CASE("training with dynamics on a separable set") {
  DatasetView ds;
  ds.num_classes = 2;
  RandomStream rs(12);
  for (int i = 0; i < 30; ++i) {
    const int label = i % 2;
    RasterImage img(3, 3, 1);
    for (auto& v : img.pixels()) v = float(label ? rs.uniform(0.6, 1.0) : rs.uniform(0.0, 0.4));
    ds.samples.push_back({img, label, SampleId(500 + i)});
  }
  TrainConfig cfg;
  cfg.epochs = 25;
  cfg.batch_size = 4;
  const TrainResult r = train_with_dynamics(ds, cfg);
  CHECK(r.log.epochs() == 25);
  CHECK(r.log.num_samples() == 30);
  CHECK(accuracy(r.model, ds) == 1.0);
  for (std::size_t i = 0; i < 30; ++i) {
    const EpochRecord& last = r.log.record(i, 24);
    CHECK(last.correct);
    // The final record is the final model's prediction.
    const ProbVector p = r.model.predict(ds.samples[i].image);
    for (std::size_t c = 0; c < 2; ++c) CHECK(last.probs[c] == doctest::Approx(p[c]).epsilon(1e-6));
  }
  const TrainResult again = train_with_dynamics(ds, cfg);
  CHECK(again.log == r.log);
  CHECK(again.model == r.model);
}
