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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Usage: dscomp_acceptance <path-to-dscomp-cli>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "dscomp/harness.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace dscomp;
using namespace dscomp::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

constexpr int kSeeds = 5;

// Desk data and per-seed observers shared by several criteria.
struct Desk {
  RunConfig config;
  DeskSplit split;
  ScoreTable scores;

  struct Observed {
    ToyModel model;
    std::vector<Stratum> strata;
  };
  std::map<std::uint64_t, Observed> observed;

  Desk() : split(load_split(config)), scores(score_dataset(split.train, config.score.train)) {}

  // Observer trained on the full train split with the given seed, plus the
  // five pruned strata built from its scores.
  const Observed& observer(std::uint64_t seed) {
    auto it = observed.find(seed);
    if (it != observed.end()) return it->second;
    TrainConfig tc = config.score.train;
    tc.seed = seed;
    TrainResult run = train_with_dynamics(split.train, tc);
    const ScoreTable s = build_score_table(run.log, tc.effective_early_window());
    auto strata = entropy_strata(split.train, s, TableOptions{}.stratum_ipc, seed);
    return observed.emplace(seed, Observed{std::move(run.model), std::move(strata)}).first->second;
  }
};

Desk& desk() {
  static Desk d;
  return d;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += fmt::format("{}{:.3f}", out.empty() ? "" : " ", x);
  return out;
}

// 1
Outcome metric_oracles() {
  RandomStream rs(101);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rs.integer(1, 40), epochs = rs.integer(1, 20), classes = rs.integer(2, 10);
    const RawLog raw = fuzz_log(rs, n, epochs, classes);
    const DynamicsLog log = to_log(raw);
    const int window = rs.integer(1, epochs);
    const ScoreTable t = build_score_table(log, window);
    for (int i = 0; i < n; ++i) {
      const ScoreRow& r = t.rows[i];
      if (r.forgetting != brute_forgetting(raw, i)) ++mismatches;
      if (std::abs(r.el2n - brute_el2n(raw, i, window)) > 1e-9) ++mismatches;
      if (std::abs(r.aum - brute_aum(raw, i)) > 1e-9) ++mismatches;
    }
  }
  return {mismatches == 0, fmt::format("{} mismatches over 100 logs", mismatches)};
}

// 2
Outcome selection_oracle() {
  RandomStream rs(202);
  int mismatches = 0;
  const Metric metrics[] = {Metric::el2n, Metric::forgetting, Metric::aum};
  for (int trial = 0; trial < 1000; ++trial) {
    const int classes = rs.integer(1, 4);
    const int n = rs.integer(classes, 20);
    const ScoreTable t = fuzz_score_table(rs, n, classes, trial % 2 == 0);
    SelectionSpec spec;
    spec.metric = metrics[trial % 3];
    spec.direction = rs.bernoulli(0.5) ? Direction::easy : Direction::hard;
    spec.random_tie_break = rs.bernoulli(0.25);
    spec.seed = static_cast<std::uint64_t>(trial);
    std::map<int, int> counts;
    for (const auto& r : t.rows) ++counts[r.label];
    int smallest = n;
    for (const auto& [c, k] : counts) smallest = std::min(smallest, k);
    spec.ipc = rs.integer(1, smallest);
    if (select_balanced(t, spec).ids != enumerate_balanced(t, spec)) ++mismatches;
    const auto total = static_cast<std::size_t>(rs.integer(0, n));
    if (select_unbalanced(t, spec, total).ids != enumerate_best(t.rows, spec, total)) ++mismatches;
  }
  return {mismatches == 0, fmt::format("{} mismatches over 1000 tables", mismatches)};
}

// 3
Outcome pruning_rule_direction() {
  Desk& d = desk();
  const int ipc = d.config.select.ipc;
  int wins = 0;
  std::vector<double> eb, hb, eu;
  for (int s = 0; s < kSeeds; ++s) {
    double acc[3];
    int i = 0;
    for (auto [dir, bal] : {std::pair{Direction::easy, true}, std::pair{Direction::hard, true},
                            std::pair{Direction::easy, false}}) {
      SelectionSpec spec;
      spec.metric = Metric::el2n;
      spec.direction = dir;
      spec.balanced = bal;
      spec.ipc = ipc;
      spec.seed = static_cast<std::uint64_t>(s);
      acc[i++] = evaluate_selection(d.split, d.config, d.scores, spec).accuracy;
    }
    eb.push_back(acc[0]);
    hb.push_back(acc[1]);
    eu.push_back(acc[2]);
    wins += acc[0] > acc[1] && acc[0] > acc[2];
  }
  const double pruned = 1.0 - double(ipc) / d.config.dataset.train_per_class;
  return {wins >= 4 && pruned >= 0.95,
          fmt::format("ipc={} ({:.0f}% pruned) easyB [{}] hardB [{}] easyU [{}] wins {}/5", ipc,
                      100 * pruned, join(eb), join(hb), join(eu), wins)};
}

// 4
Outcome ladder_direction() {
  Desk& d = desk();
  PcaOptions opt;
  opt.scores = &d.scores;
  int ladder_wins = 0, extract_wins = 0;
  std::vector<double> rnd, prn, ext, shf;
  for (int s = 0; s < kSeeds; ++s) {
    const RunConfig c = d.config.with_root_seed(static_cast<std::uint64_t>(s));
    const double a = run_pca(d.split, ladder_rung(c, "random"), opt).report.accuracy;
    const double b = run_pca(d.split, ladder_rung(c, "+prune"), opt).report.accuracy;
    const double e =
        run_pca(d.split, ladder_rung(c, "+augment", PatchMode::extract), opt).report.accuracy;
    const double f =
        run_pca(d.split, ladder_rung(c, "+augment", PatchMode::shuffle), opt).report.accuracy;
    rnd.push_back(a);
    prn.push_back(b);
    ext.push_back(e);
    shf.push_back(f);
    ladder_wins += a <= b && b <= e;
    extract_wins += e >= f;
  }
  return {ladder_wins >= 4 && extract_wins >= 4,
          fmt::format("random [{}] +prune [{}] +augment(extract) [{}] shuffle [{}] ladder {}/5 "
                      "extract>=shuffle {}/5",
                      join(rnd), join(prn), join(ext), join(shf), ladder_wins, extract_wins)};
}

// 5
Outcome selective_crop_invariant() {
  Desk& d = desk();
  std::size_t violations = 0, checked = 0;
  for (int s = 0; s < kSeeds; ++s) {
    const Observer obs = observe(d.observer(static_cast<std::uint64_t>(s)).model);
    const CropSpec spec = CropSpec::square(0.08, d.config.dataset.side);
    for (const auto& sample : d.split.train.samples) {
      RandomStream stream = RandomStream::derive(static_cast<std::uint64_t>(s), "selective-crop",
                                                 sample.sample_id);
      const SelectedCrop best = selective_min_nll_crop(obs, sample, 10, spec, stream, true);
      violations += best.nll > label_nll(obs(sample.image), sample.label);
      ++checked;
    }
  }
  return {violations == 0,
          fmt::format("{} violations over {} samples x 5 seeds", violations, checked / kSeeds)};
}

// 6
Outcome nll_increase_witness() {
  Desk& d = desk();
  bool ok = true;
  std::string detail;
  for (double r : {0.08, 0.5, 0.8}) {
    std::vector<double> means;
    for (int s = 0; s < kSeeds; ++s) {
      const auto& o = d.observer(static_cast<std::uint64_t>(s));
      const IncreaseStats st = crop_nll_increase_prob(observe(o.model), o.strata[2].dataset, r,
                                                      100, static_cast<std::uint64_t>(s));
      means.push_back(st.mean);
      ok = ok && st.mean < 1.0;
    }
    detail += fmt::format("r={} [{}] ", r, join(means));
  }
  return {ok, detail};
}

// 7
Outcome entropy_cases() {
  Desk& d = desk();
  int case1 = 0, case2 = 0, case3 = 0;
  std::vector<double> p, i08, i8, rep;
  for (int s = 0; s < kSeeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    const auto& o = d.observer(seed);
    const Observer obs = observe(o.model);
    const DatasetView& random = o.strata[2].dataset;
    const IncreaseStats up = crop_entropy_increase_prob(obs, random, 0.08, 100, seed);
    const IncrementRecord small = entropy_increment_single_vs_repeated(obs, random, 0.08, 100, seed);
    const IncrementRecord large = entropy_increment_single_vs_repeated(obs, random, 0.8, 100, seed);
    p.push_back(up.mean);
    i08.push_back(small.single_increment);
    i8.push_back(large.single_increment);
    rep.push_back(small.repeated_increment);
    case1 += up.mean > 0.5;
    case2 += small.single_increment >= large.single_increment;
    case3 += small.repeated_increment >= small.single_increment;
  }
  return {case1 >= 4 && case2 >= 4 && case3 >= 4,
          fmt::format("case1 p(up)@0.08 [{}] {}/5; case2 inc@0.08 [{}] vs @0.8 [{}] {}/5; "
                      "case3 repeated [{}] {}/5",
                      join(p), case1, join(i08), join(i8), case2, join(rep), case3)};
}

// 8
Outcome correlation_machinery() {
  RandomStream rs(808);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = rs.integer(3, 50);
    std::vector<double> x(n), y(n);
    const double slope = rs.normal();
    for (int i = 0; i < n; ++i) {
      x[i] = rs.normal(rs.uniform(-5, 5), rs.uniform(0.1, 3));
      y[i] = slope * x[i] + rs.normal();
    }
    long double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= n;
    my /= n;
    long double sxy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
      syy += (y[i] - my) * (y[i] - my);
    }
    const double oracle = double(sxy / std::sqrt(sxx * syy));
    const auto rho = pearson(x, y);
    worst = std::max(worst, rho ? std::abs(*rho - oracle) : 1.0);
  }

  Desk& d = desk();
  const auto& o = d.observer(0);
  const auto reports = nll_entropy_correlation(observe(o.model), o.strata, 0.08, 100, 0);
  bool report_ok = reports.size() == 5;
  std::string rows;
  for (const auto& r : reports) {
    report_ok = report_ok && r.rho && std::isfinite(*r.rho) && *r.rho >= -1.0 && *r.rho <= 1.0 &&
                r.concordant_fraction >= 0.0 && r.concordant_fraction <= 1.0;
    rows += fmt::format(" {}: rho={} concordant={:.2f};", r.stratum,
                        r.rho ? fmt::format("{:.3f}", *r.rho) : "undefined", r.concordant_fraction);
  }
  return {worst <= 1e-12 && report_ok,
          fmt::format("max |pearson - oracle| = {:.2e};{}", worst, rows)};
}

// 9
Outcome geometry_invariants() {
  RandomStream rs(909);
  std::size_t crossings = 0, out_of_range = 0, bitwise = 0, success = 0;
  for (int i = 0; i < 100000; ++i) {
    const int k = rs.integer(1, 4), cell = rs.integer(2, 8), side = k * cell;
    const RasterImage comp = coordinate_image(side, side);
    PipelineConfig cfg = PipelineConfig::pca_default(k, rs.integer(2, 12));
    cfg.interpolation = Interpolation::nearest;
    cfg.flip_enabled = rs.bernoulli(0.5);
    cfg.crop.r_min = rs.uniform(0.01, 1.0);
    RandomStream stream = RandomStream::derive(9, "geometry", static_cast<std::uint64_t>(i));
    RandomStream probe = stream;
    const int index = k == 1 ? 0 : static_cast<int>(probe.index(std::size_t(k) * k));
    const GeometricOutput out = apply_geometric(comp, cfg, stream);
    for (float v : out.image.pixels()) {
      const int pos = decode_coordinate(v, side, side);
      if (pos / side / cell != index / k || pos % side / cell != index % k) {
        ++crossings;
        break;
      }
    }
  }
  CropSpec spec;
  while (success < 100000) {
    const int h = rs.integer(4, 256), w = rs.integer(4, 256);
    const CropDraw d = sample_crop_rect(h, w, spec, rs);
    if (!d.rect.inside(h, w)) ++out_of_range;
    if (d.fallback) continue;
    ++success;
    const double area = double(h) * w;
    const double frac = double(d.rect.area()) / area;
    const double eps = (0.5 * (d.rect.height + d.rect.width) + 0.25) / area;
    if (frac < spec.r_min - eps || frac > spec.r_max + eps) ++out_of_range;
  }
  Desk& dk = desk();
  SelectionSpec sel;
  sel.ipc = 8;
  const SubsetIndices subset = select_balanced(dk.scores, sel);
  const CompressedDataset comp =
      build_compressed_dataset(dk.split.train, subset, GridSpec{2, 16}, 2, Interpolation::nearest);
  for (const auto& item : comp.items) {
    for (const auto& cell : item.cells) {
      const RasterImage expect =
          standardize_image(dk.split.train.find(cell.source_id).image, 16, Interpolation::nearest);
      if (!(extract_cell(item, cell.row, cell.col) == expect)) ++bitwise;
    }
  }
  return {crossings == 0 && out_of_range == 0 && bitwise == 0,
          fmt::format("cell crossings {} / 1e5, area out of range {} / 1e5, cell mismatches {} / {}",
                      crossings, out_of_range, bitwise, subset.ids.size())};
}

// 10
Outcome regularization_direction() {
  Desk& d = desk();
  PcaOptions opt;
  opt.scores = &d.scores;
  int wins = 0;
  std::vector<double> co, cm;
  for (int s = 0; s < kSeeds; ++s) {
    double acc[2];
    int i = 0;
    for (MixKind kind : {MixKind::cutout, MixKind::cutmix}) {
      RunConfig c = d.config.with_root_seed(static_cast<std::uint64_t>(s));
      c.augment.mix.kind = kind;
      c.augment.mix.probability = 1.0;
      c.augment.mix.label_mixing = true;
      acc[i++] = run_pca(d.split, c, opt).report.accuracy;
    }
    co.push_back(acc[0]);
    cm.push_back(acc[1]);
    wins += acc[0] >= acc[1];
  }
  return {wins >= 4,
          fmt::format("cutout [{}] cutmix [{}] cutout>=cutmix {}/5", join(co), join(cm), wins)};
}

// 11
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string report_accuracy(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("label,", 0) == 0) continue;
    std::istringstream row(line);
    std::string label, hash, acc;
    std::getline(row, label, ',');
    std::getline(row, hash, ',');
    std::getline(row, acc, ',');
    return acc;
  }
  return "";
}

Outcome cli_determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI path given"};
  TempDir dir("acceptance_cli");
  const auto cfg = dir / "run.cfg";
  std::ofstream(cfg) << render_run_config(RunConfig{});
  std::vector<std::filesystem::path> outs = {dir / "a", dir / "b"};
  for (const auto& out : outs) {
    const std::string cmd =
        fmt::format("{} pca --config {} --seed 3 --out {} > /dev/null", cli, cfg.string(), out.string());
    if (std::system(cmd.c_str()) != 0) return {false, "pca command failed: " + cmd};
  }
  std::size_t files = 0, differ = 0;
  for (const auto& e : std::filesystem::directory_iterator(outs[0] / "compressed")) {
    ++files;
    const auto other = outs[1] / "compressed" / e.path().filename();
    if (!std::filesystem::exists(other) || slurp(e.path()) != slurp(other)) ++differ;
  }
  std::size_t files_b = 0;
  for (const auto& e : std::filesystem::directory_iterator(outs[1] / "compressed")) {
    (void)e;
    ++files_b;
  }
  const std::string acc_a = report_accuracy(outs[0] / "report.csv");
  const std::string acc_b = report_accuracy(outs[1] / "report.csv");
  return {files > 0 && files == files_b && differ == 0 && !acc_a.empty() && acc_a == acc_b,
          fmt::format("{} files, {} differ; accuracy {} vs {}", files, differ, acc_a, acc_b)};
}

// 12
Outcome forgetting_degeneracy() {
  // 60% of rows never forgotten; classes 0-2 have a single unique score.
  ScoreTable ties;
  for (int i = 0; i < 50; ++i) {
    const int label = i % 5;
    ties.rows.push_back({SampleId(i), label, 0.01 * i, label < 3 ? 0 : 1 + (i / 5) % 4, 0.0});
  }
  std::size_t zeros = 0;
  for (const auto& r : ties.rows) zeros += r.forgetting == 0;
  SelectionSpec spec;
  spec.metric = Metric::forgetting;
  spec.ipc = 3;
  const BalanceReport fires = balance_report(ties, select_balanced(ties, spec));

  ScoreTable distinct;
  for (int i = 0; i < 50; ++i) distinct.rows.push_back({SampleId(i), i % 5, 0.0, 1 + i, 0.0});
  const BalanceReport quiet = balance_report(distinct, select_balanced(distinct, spec));
  return {2 * zeros > ties.rows.size() && fires.degeneracy_warning && !quiet.degeneracy_warning,
          fmt::format("zero-forgetting {}/50: warning {}; all distinct: warning {}", zeros,
                      fires.degeneracy_warning, quiet.degeneracy_warning)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<Criterion> criteria = {
      {1, "metric-oracles", 10, metric_oracles},
      {2, "selection-oracle", 30, selection_oracle},
      {3, "pruning-rule-direction", 300, pruning_rule_direction},
      {4, "ablation-ladder-direction", 600, ladder_direction},
      {5, "selective-crop-invariant", 60, selective_crop_invariant},
      {6, "nll-increase-witness", 120, nll_increase_witness},
      {7, "entropy-cases", 300, entropy_cases},
      {8, "correlation-machinery", 120, correlation_machinery},
      {9, "geometry-invariants", 120, geometry_invariants},
      {10, "regularization-direction", 600, regularization_direction},
      {11, "cli-determinism", 300, [&] { return cli_determinism(cli); }},
      {12, "forgetting-degeneracy", 10, forgetting_degeneracy},
  };
  const auto suite_start = Clock::now();
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = secs <= c.limit_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s %2d %-27s %7.1fs  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str(), in_time ? "" : " (over time limit)");
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(Clock::now() - suite_start).count();
  std::printf("%d of %zu criteria passed in %.1fs\n", int(criteria.size()) - failed,
              criteria.size(), total);
  return failed == 0 ? 0 : 1;
}
