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

#include "dscomp/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>
#include "json.hpp"

#include "dscomp/error.hpp"

namespace dscomp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool is_static(const PipelineConfig& p) {
  return p.patch == PatchMode::none && !p.crop_enabled && !p.flip_enabled &&
         (p.mix.kind == MixKind::none || p.mix.probability == 0.0);
}

ScoreTable unscored_table(const DatasetView& dataset) {
  ScoreTable table;
  for (const auto& s : dataset.samples) table.rows.push_back({s.sample_id, s.label, 0.0, 0, 0.0});
  return table;
}

void check_disjoint(const DatasetView& train, const DatasetView& test) {
  std::unordered_set<SampleId> ids;
  for (const auto& s : train.samples) ids.insert(s.sample_id);
  for (const auto& s : test.samples) {
    if (ids.count(s.sample_id)) {
      throw InvalidArgument(fmt::format("test sample {} also appears in training data",
                                        s.sample_id));
    }
  }
}

std::uintmax_t write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  return text.size();
}

double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

std::string provenance_line(std::string_view tag, const RunConfig& config,
                            const DeskSplit& split, std::span<const std::uint64_t> seeds) {
  std::string s = fmt::format("# dscomp tables {} config={} train_hash={:016x} seeds=", tag,
                              config_hash(config), dataset_hash(split.train));
  for (std::size_t i = 0; i < seeds.size(); ++i) s += fmt::format("{}{}", i ? ";" : "", seeds[i]);
  return s + "\n";
}

}  // namespace

RandomStream augment_stream(std::uint64_t seed, int epoch, SampleId sample_id) {
  return RandomStream::derive(derive_seed(seed, "augment", static_cast<std::uint64_t>(epoch)),
                              "augment-sample", sample_id);
}

RunReport evaluate_hard_label(const DatasetView& train, const DatasetView& test,
                              const EvalConfig& config) {
  const auto start = Clock::now();
  config.validate();
  train.validate();
  test.validate();
  if (train.num_classes != test.num_classes) {
    throw InvalidArgument(fmt::format("training data has {} classes, test data has {}",
                                      train.num_classes, test.num_classes));
  }
  check_disjoint(train, test);
  const int side = config.pipeline.crop.out_side;
  for (const auto& s : test.samples) {
    if (s.image.height() != side || s.image.width() != side) {
      throw InvalidArgument(fmt::format("test images must be {0}x{0} to match the pipeline", side));
    }
  }
  const int channels = train.samples.front().image.channels();
  const int input_dim = side * side * channels;
  const int classes = train.num_classes;
  const std::size_t n = train.size();

  std::vector<const RasterImage*> images(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    images[i] = &train.samples[i].image;
    labels[i] = train.samples[i].label;
  }

  // Without random stages every epoch sees the same inputs.
  Eigen::MatrixXf fixed;
  if (is_static(config.pipeline)) {
    fixed.resize(input_dim, static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const RasterImage& img = *images[i];
      fixed.col(static_cast<Eigen::Index>(i)) =
          image_features(img.height() == side && img.width() == side
                             ? img
                             : resize(img, side, side, config.pipeline.interpolation));
    }
  }

  std::vector<const RasterImage*> batch_images;
  std::vector<int> batch_labels;
  std::vector<RandomStream> streams;
  auto provider = [&](int epoch, std::span<const std::size_t> indices, Eigen::MatrixXf& inputs,
                      Eigen::MatrixXf& targets) {
    targets.setZero();
    if (fixed.size() > 0) {
      for (std::size_t j = 0; j < indices.size(); ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        inputs.col(col) = fixed.col(static_cast<Eigen::Index>(indices[j]));
        targets(labels[indices[j]], col) = 1.0f;
      }
      return;
    }
    batch_images.clear();
    batch_labels.clear();
    streams.clear();
    for (std::size_t idx : indices) {
      batch_images.push_back(images[idx]);
      batch_labels.push_back(labels[idx]);
      streams.push_back(augment_stream(config.seed, epoch, train.samples[idx].sample_id));
    }
    const auto out = augment_batch(batch_images, batch_labels, classes, config.pipeline, streams);
    for (std::size_t j = 0; j < out.size(); ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      inputs.col(col) = image_features(out[j].image);
      for (int c = 0; c < classes; ++c) {
        targets(c, col) = static_cast<float>(out[j].label_weights[static_cast<std::size_t>(c)]);
      }
    }
  };

  RunReport report;
  report.train_images = n;
  report.provenance = train.name;
  try {
    const ToyModel model =
        train_model(n, input_dim, classes, config.train_config(), provider);
    report.accuracy = accuracy(model, test);
  } catch (const TrainingDivergence& e) {
    report.diverged = true;
    report.divergence_epoch = e.epoch();
    report.accuracy = 0.0;
  }
  report.total_seconds = seconds_since(start);
  report.stages.push_back({"evaluate", report.total_seconds, 0});
  return report;
}

DeskSplit load_split(const RunConfig& config) {
  if (!config.dataset.dir.empty()) {
    DeskSplit split;
    split.train = load_dataset(config.dataset.dir / "train");
    split.test = load_dataset(config.dataset.dir / "test");
    return split;
  }
  return make_desk_split(config.dataset.classes, config.dataset.train_per_class,
                         config.dataset.test_per_class, config.dataset.side, config.dataset.seed);
}

ScoreTable score_dataset(const DatasetView& train, const TrainConfig& config) {
  const TrainResult run = train_with_dynamics(train, config);
  return build_score_table(run.log, config.effective_early_window());
}

CompressedDataset build_single_dataset(const DatasetView& dataset, const SubsetIndices& subset,
                                       int side, Interpolation mode) {
  CompressedDataset out;
  out.num_classes = dataset.num_classes;
  out.grid = GridSpec{1, side};
  out.provenance = fmt::format("k=1 cell_side={} <- {}", side, subset.provenance);
  for (SampleId id : subset.ids) {
    const LabeledSample& s = dataset.find(id);
    out.items.push_back(combine(std::span<const LabeledSample>(&s, 1), out.grid, mode));
  }
  return out;
}

PcaResult run_pca(const DeskSplit& split, const RunConfig& config, const PcaOptions& options) {
  const auto start = Clock::now();
  config.validate();
  check_disjoint(split.train, split.test);
  const auto& dir = options.output_dir;
  if (dir) std::filesystem::create_directories(*dir);

  PcaResult result;
  RunReport& report = result.report;

  // Score.
  auto t = Clock::now();
  ScoreTable owned;
  const ScoreTable* scores = options.scores;
  std::uintmax_t score_bytes = 0;
  if (!config.select.enabled) {
    owned = unscored_table(split.train);
    scores = &owned;
  } else if (!scores) {
    owned = config.score.file.empty() ? score_dataset(split.train, config.score.train)
                                      : load_scores(config.score.file);
    scores = &owned;
    if (dir) {
      save_scores(owned, *dir / "scores.csv");
      score_bytes = std::filesystem::file_size(*dir / "scores.csv");
    }
  }
  const double score_seconds = seconds_since(t);

  // Select.
  t = Clock::now();
  SelectionSpec spec;
  spec.metric = config.select.enabled ? config.select.metric : Metric::random;
  spec.direction = config.select.direction;
  spec.balanced = config.select.balanced;
  spec.random_tie_break = config.select.random_tie_break;
  spec.seed = config.select.seed;
  spec.ipc = config.sources_per_class();
  result.subset =
      spec.balanced
          ? select_balanced(*scores, spec)
          : select_unbalanced(*scores, spec,
                              static_cast<std::size_t>(spec.ipc) * split.train.num_classes);
  std::uintmax_t select_bytes = 0;
  if (dir) {
    save_subset(result.subset, *dir / "subset.txt");
    select_bytes = std::filesystem::file_size(*dir / "subset.txt");
  }
  const double select_seconds = seconds_since(t);

  // Combine.
  t = Clock::now();
  const GridSpec grid = config.grid();
  result.compressed =
      config.combine.enabled
          ? build_compressed_dataset(split.train, result.subset, grid, config.select.ipc,
                                     config.augment.interpolation)
          : build_single_dataset(split.train, result.subset, grid.cell_side,
                                 config.augment.interpolation);
  report.storage = storage_report(result.compressed);
  std::uintmax_t combine_bytes = 0;
  if (dir) combine_bytes = write_compressed_dataset(result.compressed, *dir / "compressed");
  const double combine_seconds = seconds_since(t);

  // Evaluate.
  t = Clock::now();
  EvalConfig eval = config.eval;
  eval.pipeline = config.augment;
  eval.pipeline.grid_k = grid.k;
  DatasetView view = result.compressed.as_view();
  view.name = result.compressed.provenance;
  const RunReport evaluated = evaluate_hard_label(view, split.test, eval);
  const double eval_seconds = seconds_since(t);

  report.label = options.label;
  report.config_hash = config_hash(config);
  report.provenance = result.compressed.provenance;
  report.accuracy = evaluated.accuracy;
  report.diverged = evaluated.diverged;
  report.divergence_epoch = evaluated.divergence_epoch;
  report.train_images = evaluated.train_images;
  report.stages = {{"score", score_seconds, score_bytes},
                   {"select", select_seconds, select_bytes},
                   {"combine", combine_seconds, combine_bytes},
                   {"evaluate", eval_seconds, 0}};
  report.total_seconds = seconds_since(start);
  return result;
}

RunConfig ladder_rung(const RunConfig& base, std::string_view rung, PatchMode patch) {
  RunConfig c = base;
  c.augment.patch = PatchMode::none;
  if (rung == "random") {
    c.select.enabled = false;
    c.combine.enabled = false;
  } else if (rung == "+prune") {
    c.select.enabled = true;
    c.combine.enabled = false;
  } else if (rung == "+combine") {
    c.select.enabled = true;
    c.combine.enabled = true;
  } else if (rung == "+augment") {
    c.select.enabled = true;
    c.combine.enabled = true;
    c.augment.patch = patch;
  } else {
    throw InvalidArgument("unknown ladder rung '" + std::string(rung) +
                          "' (expected random, +prune, +combine or +augment)");
  }
  return c;
}

std::vector<RunReport> run_ablation_ladder(const DeskSplit& split, const RunConfig& base,
                                           const ScoreTable& scores, PatchMode patch) {
  std::vector<RunReport> reports;
  for (std::string_view rung : kLadderRungs) {
    PcaOptions options;
    options.scores = &scores;
    options.label = std::string(rung);
    reports.push_back(run_pca(split, ladder_rung(base, rung, patch), options).report);
  }
  return reports;
}

CostReport cost_report(const RunReport& report) {
  CostReport c;
  c.stages = report.stages;
  for (const auto& s : report.stages) {
    c.stage_seconds += s.seconds;
    c.total_bytes += s.bytes;
  }
  c.total_seconds = report.total_seconds;
  return c;
}

void write_cost_report(std::ostream& out, const CostReport& report) {
  out << "# dscomp cost report\n";
  out << "stage,seconds,bytes\n";
  for (const auto& s : report.stages) out << fmt::format("{},{:.6f},{}\n", s.stage, s.seconds, s.bytes);
  out << fmt::format("total,{:.6f},{}\n", report.total_seconds, report.total_bytes);
}

namespace {

constexpr const char* kReportColumns =
    "label,config_hash,accuracy,diverged,divergence_epoch,train_images,total_seconds,"
    "storage_bytes,provenance";

std::string report_line(const RunReport& r) {
  return fmt::format("{},{},{:.6f},{},{},{},{:.3f},{},\"{}\"\n", r.label, r.config_hash,
                     r.accuracy, r.diverged ? 1 : 0, r.divergence_epoch, r.train_images,
                     r.total_seconds, r.storage ? r.storage->total_bytes : 0, r.provenance);
}

}  // namespace

void write_run_reports(std::ostream& out, const std::vector<RunReport>& reports,
                       bool with_header) {
  if (with_header) out << "# dscomp run reports\n" << kReportColumns << "\n";
  for (const auto& r : reports) out << report_line(r);
}

void append_run_report(const std::filesystem::path& path, const RunReport& report) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot append to " + path.string());
  write_run_reports(out, {report}, fresh);
}

RunReport evaluate_selection(const DeskSplit& split, const RunConfig& config,
                             const ScoreTable& scores, const SelectionSpec& spec) {
  const SubsetIndices subset =
      spec.balanced
          ? select_balanced(scores, spec)
          : select_unbalanced(scores, spec,
                              static_cast<std::size_t>(spec.ipc) * split.train.num_classes);
  const CompressedDataset data =
      build_single_dataset(split.train, subset, config.dataset.side, config.augment.interpolation);
  EvalConfig eval = config.eval;
  eval.seed = spec.seed;
  eval.pipeline = config.augment;
  eval.pipeline.patch = PatchMode::none;
  eval.pipeline.grid_k = 1;
  DatasetView view = data.as_view();
  view.name = data.provenance;
  RunReport report = evaluate_hard_label(view, split.test, eval);
  report.label = spec.describe();
  report.provenance = data.provenance;
  report.storage = storage_report(data);
  return report;
}

std::vector<PruningRuleCell> pruning_rule_grid(const DeskSplit& split, const RunConfig& config,
                                               const ScoreTable& scores,
                                               std::span<const Metric> metrics,
                                               std::span<const int> ipcs,
                                               std::span<const std::uint64_t> seeds) {
  std::vector<PruningRuleCell> cells;
  for (Metric metric : metrics) {
    for (int ipc : ipcs) {
      for (Direction direction : {Direction::hard, Direction::easy}) {
        for (bool balanced : {false, true}) {
          PruningRuleCell cell{metric, ipc, direction, balanced, {}};
          for (std::uint64_t seed : seeds) {
            SelectionSpec spec;
            spec.metric = metric;
            spec.direction = direction;
            spec.balanced = balanced;
            spec.ipc = ipc;
            spec.seed = seed;
            cell.accuracy.push_back(evaluate_selection(split, config, scores, spec).accuracy);
          }
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

std::vector<Stratum> entropy_strata(const DatasetView& train, const ScoreTable& scores, int ipc,
                                    std::uint64_t seed) {
  const std::size_t total = static_cast<std::size_t>(ipc) * train.num_classes;
  auto make = [&](const char* name, Metric metric, Direction direction, bool balanced) {
    SelectionSpec spec;
    spec.metric = metric;
    spec.direction = direction;
    spec.balanced = balanced;
    spec.ipc = ipc;
    spec.seed = seed;
    const SubsetIndices subset =
        balanced ? select_balanced(scores, spec) : select_unbalanced(scores, spec, total);
    return Stratum{name, subset_view(train, subset.ids, name)};
  };
  return {make("easy-only", Metric::el2n, Direction::easy, false),
          make("easy+balanced", Metric::el2n, Direction::easy, true),
          make("random", Metric::random, Direction::easy, true),
          make("hard+balanced", Metric::el2n, Direction::hard, true),
          make("hard-only", Metric::el2n, Direction::hard, false)};
}

ToyModel train_observer(const DatasetView& train, const TrainConfig& config) {
  return train_with_dynamics(train, config).model;
}

namespace {

std::vector<std::filesystem::path> pruning_rules_table(const DeskSplit& split,
                                                       const RunConfig& config,
                                                       const std::filesystem::path& dir,
                                                       const TableOptions& options) {
  const ScoreTable scores = config.score.file.empty()
                                ? score_dataset(split.train, config.score.train)
                                : load_scores(config.score.file);
  const Metric metrics[] = {Metric::el2n, Metric::aum};
  const int ipcs[] = {2, 10};
  const auto cells = pruning_rule_grid(split, config, scores, metrics, ipcs, options.seeds);

  const std::string head = provenance_line("pruning-rules", config, split, options.seeds);
  std::string table = head + "metric";
  for (int ipc : ipcs) {
    for (const char* col : {"hard", "hard_B", "easy", "easy_B"}) {
      table += fmt::format(",ipc{}_{}", ipc, col);
    }
  }
  table += "\n";
  std::string runs = head + "metric,ipc,direction,balanced,seed,accuracy\n";
  for (Metric metric : metrics) {
    table += std::string(to_string(metric));
    for (const auto& cell : cells) {
      if (cell.metric != metric) continue;
      table += fmt::format(",{:.4f}", mean_of(cell.accuracy));
      for (std::size_t i = 0; i < cell.accuracy.size(); ++i) {
        runs += fmt::format("{},{},{},{},{},{:.6f}\n", to_string(metric), cell.ipc,
                            to_string(cell.direction), cell.balanced ? 1 : 0, options.seeds[i],
                            cell.accuracy[i]);
      }
    }
    table += "\n";
  }
  write_text(dir / "pruning_rules.csv", table);
  write_text(dir / "pruning_rules_runs.csv", runs);
  return {dir / "pruning_rules.csv", dir / "pruning_rules_runs.csv"};
}

std::vector<std::filesystem::path> crop_ratio_table(const DeskSplit& split,
                                                    const RunConfig& config,
                                                    const std::filesystem::path& dir,
                                                    const TableOptions& options) {
  const ScoreTable scores = config.score.file.empty()
                                ? score_dataset(split.train, config.score.train)
                                : load_scores(config.score.file);
  const double ratios[] = {0.01, 0.08, 0.5, 0.8, 1.0};
  const int ipcs[] = {2, 10};
  const std::string head = provenance_line("crop-ratio", config, split, options.seeds);
  std::string table = head + "crop_min,ipc2,ipc10\n";
  std::string runs = head + "crop_min,ipc,seed,accuracy\n";
  for (double r : ratios) {
    table += fmt::format("{}", r);
    for (int ipc : ipcs) {
      std::vector<double> acc;
      for (std::uint64_t seed : options.seeds) {
        RunConfig c = config.with_root_seed(seed);
        c.select.ipc = ipc;
        c.augment.crop.r_min = r;
        PcaOptions o;
        o.scores = &scores;
        acc.push_back(run_pca(split, c, o).report.accuracy);
        runs += fmt::format("{},{},{},{:.6f}\n", r, ipc, seed, acc.back());
      }
      table += fmt::format(",{:.4f}", mean_of(acc));
    }
    table += "\n";
  }
  write_text(dir / "crop_ratio.csv", table);
  write_text(dir / "crop_ratio_runs.csv", runs);
  return {dir / "crop_ratio.csv", dir / "crop_ratio_runs.csv"};
}

std::vector<std::filesystem::path> reg_augment_table(const DeskSplit& split,
                                                     const RunConfig& config,
                                                     const std::filesystem::path& dir,
                                                     const TableOptions& options) {
  const ScoreTable scores = config.score.file.empty()
                                ? score_dataset(split.train, config.score.train)
                                : load_scores(config.score.file);
  const double probs[] = {0.2, 0.5, 1.0};
  struct Row {
    MixKind kind;
    bool label_mixing;
  };
  const Row rows[] = {{MixKind::cutmix, true},
                      {MixKind::cutmix, false},
                      {MixKind::mixup, true},
                      {MixKind::mixup, false},
                      {MixKind::cutout, false}};
  const std::string head = provenance_line("reg-augment", config, split, options.seeds);
  std::string table = head + "mixing,label_mixing,p0.2,p0.5,p1.0\n";
  std::string runs = head + "mixing,label_mixing,probability,seed,accuracy\n";

  auto run = [&](MixKind kind, bool label_mixing, double p) {
    std::vector<double> acc;
    for (std::uint64_t seed : options.seeds) {
      RunConfig c = config.with_root_seed(seed);
      c.augment.mix.kind = kind;
      c.augment.mix.probability = p;
      c.augment.mix.label_mixing = label_mixing;
      PcaOptions o;
      o.scores = &scores;
      acc.push_back(run_pca(split, c, o).report.accuracy);
      runs += fmt::format("{},{},{},{},{:.6f}\n", to_string(kind), label_mixing ? 1 : 0, p, seed,
                          acc.back());
    }
    return mean_of(acc);
  };

  const double baseline = run(MixKind::none, false, 0.0);
  table += fmt::format("none,-,{0:.4f},{0:.4f},{0:.4f}\n", baseline);
  for (const auto& row : rows) {
    table += fmt::format("{},{}", to_string(row.kind),
                         row.kind == MixKind::cutout ? "-" : (row.label_mixing ? "yes" : "no"));
    for (double p : probs) table += fmt::format(",{:.4f}", run(row.kind, row.label_mixing, p));
    table += "\n";
  }
  write_text(dir / "reg_augment.csv", table);
  write_text(dir / "reg_augment_runs.csv", runs);
  return {dir / "reg_augment.csv", dir / "reg_augment_runs.csv"};
}

std::vector<std::filesystem::path> entropy_lab_tables(const DeskSplit& split,
                                                      const RunConfig& config,
                                                      const std::filesystem::path& dir,
                                                      const TableOptions& options) {
  const double ratios[] = {0.08, 0.2, 0.5, 0.8};
  constexpr double kCorrelationRatio = 0.08;
  const std::uint64_t seed = options.seeds.empty() ? 0 : options.seeds.front();
  const TrainResult observed = train_with_dynamics(split.train, config.score.train);
  const ScoreTable scores =
      build_score_table(observed.log, config.score.train.effective_early_window());
  const Observer observer = observe(observed.model);
  const auto strata = entropy_strata(split.train, scores, options.stratum_ipc, seed);

  const std::string head = provenance_line("entropy-lab", config, split, {&seed, 1});
  std::string nll_table = head + "crop_min";
  std::string inc_table = head + "crop_min";
  std::string change_table = head + "crop_min";
  for (const auto& s : strata) {
    nll_table += "," + s.name;
    inc_table += "," + s.name;
    change_table += fmt::format(",{0}_single,{0}_repeated", s.name);
  }
  nll_table += "\n";
  inc_table += "\n";
  change_table += "\n";

  std::vector<CorrelationReport> correlations;
  for (double r : ratios) {
    nll_table += fmt::format("{}", r);
    inc_table += fmt::format("{}", r);
    change_table += fmt::format("{}", r);
    for (const auto& s : strata) {
      const auto nll_up = crop_nll_increase_prob(observer, s.dataset, r, options.n_crops, seed);
      const auto ent_up =
          crop_entropy_increase_prob(observer, s.dataset, r, options.n_crops, seed);
      const auto inc =
          entropy_increment_single_vs_repeated(observer, s.dataset, r, options.n_crops, seed);
      nll_table += fmt::format(",{:.4f} +- {:.4f}", nll_up.mean, nll_up.stddev);
      inc_table += fmt::format(",{:.4f} +- {:.4f}", ent_up.mean, ent_up.stddev);
      change_table += fmt::format(",{:.4f},{:.4f}", inc.single_increment, inc.repeated_increment);
    }
    nll_table += "\n";
    inc_table += "\n";
    change_table += "\n";
  }
  correlations = nll_entropy_correlation(observer, strata, kCorrelationRatio, options.n_crops, seed);
  std::string corr_table = head + "stratum,rho,concordant,mean_dl,std_dl,mean_dh,std_dh,samples\n";
  for (const auto& c : correlations) {
    corr_table += fmt::format("{},{},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{}\n", c.stratum,
                              c.rho ? fmt::format("{:.4f}", *c.rho) : std::string("undefined"),
                              c.concordant_fraction, c.mean_dl, c.std_dl, c.mean_dh, c.std_dh,
                              c.samples);
  }

  nlohmann::json manifest;
  manifest["seed"] = seed;
  manifest["r_values"] = std::vector<double>(std::begin(ratios), std::end(ratios));
  manifest["correlation_r"] = kCorrelationRatio;
  manifest["n_crops"] = options.n_crops;
  manifest["stratum_ipc"] = options.stratum_ipc;
  manifest["dataset_hash"] = fmt::format("{:016x}", dataset_hash(split.train));
  manifest["config_hash"] = config_hash(config);
  manifest["entropy_units"] = "nats";
  for (const auto& s : strata) {
    manifest["strata"][s.name] = fmt::format("{:016x}", dataset_hash(s.dataset));
  }

  write_text(dir / "nll_increase.csv", nll_table);
  write_text(dir / "nll_entropy_correlation.csv", corr_table);
  write_text(dir / "entropy_increase.csv", inc_table);
  write_text(dir / "entropy_change.csv", change_table);
  write_text(dir / "entropy_lab_manifest.json", manifest.dump(2) + "\n");
  return {dir / "nll_increase.csv", dir / "nll_entropy_correlation.csv",
          dir / "entropy_increase.csv", dir / "entropy_change.csv",
          dir / "entropy_lab_manifest.json"};
}

}  // namespace

std::vector<std::filesystem::path> run_table_experiments(std::string_view tag,
                                                         const RunConfig& config,
                                                         const std::filesystem::path& out_dir,
                                                         const TableOptions& options) {
  bool known = false;
  for (auto t : kTableTags) known = known || t == tag;
  if (!known) {
    std::string valid;
    for (auto t : kTableTags) valid += (valid.empty() ? "" : ", ") + std::string(t);
    throw InvalidArgument("unknown experiment tag '" + std::string(tag) + "' (valid: " + valid +
                          ")");
  }
  config.validate();
  std::filesystem::create_directories(out_dir);
  const DeskSplit split = load_split(config);
  if (tag == "pruning-rules") return pruning_rules_table(split, config, out_dir, options);
  if (tag == "crop-ratio") return crop_ratio_table(split, config, out_dir, options);
  if (tag == "reg-augment") return reg_augment_table(split, config, out_dir, options);
  return entropy_lab_tables(split, config, out_dir, options);
}

}  // namespace dscomp
