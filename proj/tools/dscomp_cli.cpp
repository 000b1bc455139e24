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

// dscomp command line.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "dscomp/augment.hpp"
#include "dscomp/combiner.hpp"
#include "dscomp/dataset.hpp"
#include "dscomp/dynamics.hpp"
#include "dscomp/error.hpp"
#include "dscomp/harness.hpp"
#include "dscomp/pruner.hpp"
#include "dscomp/run_config.hpp"
#include "dscomp/tensor_io.hpp"

namespace fs = std::filesystem;
using namespace dscomp;

namespace {

RunConfig config_or_default(const std::string& path) {
  return path.empty() ? RunConfig{} : load_run_config(path);
}

void print_storage(const StorageReport& r) {
  std::cout << fmt::format(
      "images={} sources={} payload_bytes={} header_bytes={} manifest_bytes={} total_bytes={}\n",
      r.images, r.source_images, r.payload_bytes, r.header_bytes, r.manifest_bytes,
      r.total_bytes);
  std::cout << fmt::format("pixels composite={} cell_resolution={} full_resolution={}\n",
                           r.composite_pixels, r.cell_resolution_pixels,
                           r.full_resolution_pixels);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prune, combine and augment small image datasets"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate the synthetic train/test split");
  int classes = 10, train_pc = 200, test_pc = 100, side = 32;
  std::uint64_t data_seed = 1;
  std::string gen_out;
  gen->add_option("--classes", classes, "Number of classes");
  gen->add_option("--train-per-class", train_pc, "Training samples per class");
  gen->add_option("--test-per-class", test_pc, "Test samples per class");
  gen->add_option("--side", side, "Image side in pixels");
  gen->add_option("--seed", data_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output directory (train/ and test/)")->required();

  // score
  auto* score = app.add_subcommand("score", "Train once and write per-sample scores");
  std::string score_data, score_out;
  TrainConfig score_cfg;
  score->add_option("--data", score_data, "Dataset directory")->required();
  score->add_option("--epochs", score_cfg.epochs, "Training epochs");
  score->add_option("--batch-size", score_cfg.batch_size, "Mini-batch size");
  score->add_option("--lr", score_cfg.learning_rate, "Learning rate");
  score->add_option("--seed", score_cfg.seed, "Training seed");
  score->add_option("--early-window", score_cfg.early_window, "Epochs averaged by EL2N");
  score->add_option("--out", score_out, "Score CSV")->required();

  // select
  auto* select = app.add_subcommand("select", "Select a subset from a score table");
  std::string sel_scores, sel_out, sel_metric = "el2n", sel_direction = "easy", sel_report;
  SelectionSpec sel;
  bool unbalanced = false, ccs = false;
  std::size_t total = 0;
  CcsSpec ccs_spec;
  select->add_option("--scores", sel_scores, "Score CSV")->required();
  select->add_option("--metric", sel_metric, "el2n, forgetting, aum or random");
  select->add_option("--direction", sel_direction, "easy or hard");
  select->add_option("--ipc", sel.ipc, "Samples per class");
  select->add_option("--seed", sel.seed, "Seed for random selection and tie breaks");
  select->add_flag("--random-tie-break", sel.random_tie_break, "Break score ties randomly");
  select->add_flag("--unbalanced", unbalanced, "Rank all classes together");
  select->add_option("--total", total, "Total count for --unbalanced (default ipc * classes)");
  select->add_flag("--ccs", ccs, "Coverage-centric stratified selection");
  select->add_option("--mislabeled-fraction", ccs_spec.mislabeled_fraction, "CCS hard cut");
  select->add_option("--strata", ccs_spec.num_strata, "CCS strata");
  select->add_option("--balance-report", sel_report, "Write a per-class balance report");
  select->add_option("--out", sel_out, "Subset file")->required();

  // combine
  auto* comb = app.add_subcommand("combine", "Tile selected images into composites");
  std::string comb_data, comb_subset, comb_out;
  GridSpec grid;
  int ipc_out = 10;
  bool nearest = false;
  comb->add_option("--data", comb_data, "Dataset directory")->required();
  comb->add_option("--subset", comb_subset, "Subset file")->required();
  comb->add_option("--k", grid.k, "Grid side in cells");
  comb->add_option("--cell-side", grid.cell_side, "Cell side in pixels");
  comb->add_option("--ipc-out", ipc_out, "Composites per class");
  comb->add_flag("--nearest", nearest, "Nearest-neighbour resampling");
  comb->add_option("--out", comb_out, "Output directory")->required();

  // augment-preview
  auto* preview = app.add_subcommand("augment-preview", "Write before/after PPM pairs");
  std::string prev_data, prev_compressed, prev_config, prev_out;
  int prev_count = 8;
  std::uint64_t prev_seed = 0;
  preview->add_option("--data", prev_data, "Dataset directory");
  preview->add_option("--compressed", prev_compressed, "Compressed dataset directory");
  preview->add_option("--config", prev_config, "Run config ([augment] section is used)");
  preview->add_option("--count", prev_count, "Number of pairs");
  preview->add_option("--seed", prev_seed, "Augmentation seed");
  preview->add_option("--out", prev_out, "Output directory")->required();

  // entropy-lab
  auto* lab = app.add_subcommand("entropy-lab", "Crop NLL/entropy experiments");
  std::string lab_config, lab_out;
  TableOptions lab_options;
  std::uint64_t lab_seed = 0;
  lab->add_option("--config", lab_config, "Run config");
  lab->add_option("--seed", lab_seed, "Crop seed");
  lab->add_option("--n-crops", lab_options.n_crops, "Crops per image");
  lab->add_option("--ipc", lab_options.stratum_ipc, "Samples per class in each stratum");
  lab->add_option("--out", lab_out, "Output directory")->required();

  // eval
  auto* ev = app.add_subcommand("eval", "Hard-label evaluation of a dataset");
  std::string ev_train, ev_compressed, ev_test, ev_config, ev_report;
  ev->add_option("--train", ev_train, "Training dataset directory");
  ev->add_option("--compressed", ev_compressed, "Compressed dataset directory");
  ev->add_option("--test", ev_test, "Test dataset directory")->required();
  ev->add_option("--config", ev_config, "Run config ([augment] and [eval] are used)");
  ev->add_option("--report", ev_report, "Append the run report to this CSV");

  // pca
  auto* pca = app.add_subcommand("pca", "Score, select, combine and evaluate");
  std::string pca_config, pca_out;
  std::optional<std::uint64_t> pca_seed;
  bool ladder = false;
  pca->add_option("--config", pca_config, "Run config");
  pca->add_option("--seed", pca_seed, "Root seed for selection and evaluation");
  pca->add_flag("--ladder", ladder, "Also run the ablation ladder");
  pca->add_option("--out", pca_out, "Output directory")->required();

  // tables
  auto* tables = app.add_subcommand("tables", "Run an experiment grid");
  std::string table_tag, table_config, table_out;
  TableOptions table_options;
  tables->add_option("tag", table_tag, "pruning-rules, crop-ratio, reg-augment or entropy-lab")
      ->required();
  tables->add_option("--config", table_config, "Run config");
  tables->add_option("--seeds", table_options.seeds, "Seeds");
  tables->add_option("--n-crops", table_options.n_crops, "Crops per image (entropy-lab)");
  tables->add_option("--out", table_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const DeskSplit split = make_desk_split(classes, train_pc, test_pc, side, data_seed);
      save_dataset(split.train, fs::path(gen_out) / "train");
      save_dataset(split.test, fs::path(gen_out) / "test");
      std::cout << fmt::format("train={} test={} train_hash={:016x}\n", split.train.size(),
                               split.test.size(), dataset_hash(split.train));
    } else if (*score) {
      const DatasetView data = load_dataset(score_data);
      save_scores(score_dataset(data, score_cfg), score_out);
    } else if (*select) {
      const ScoreTable table = load_scores(sel_scores);
      SubsetIndices subset;
      if (ccs) {
        ccs_spec.base_metric = parse_metric(sel_metric);
        ccs_spec.ipc = sel.ipc;
        ccs_spec.seed = sel.seed;
        subset = ccs_select(table, ccs_spec);
      } else {
        sel.metric = parse_metric(sel_metric);
        sel.direction = parse_direction(sel_direction);
        sel.balanced = !unbalanced;
        if (unbalanced) {
          const std::size_t n =
              total ? total : static_cast<std::size_t>(sel.ipc) * table.num_classes();
          subset = select_unbalanced(table, sel, n);
        } else {
          subset = select_balanced(table, sel);
        }
      }
      save_subset(subset, sel_out);
      if (!sel_report.empty()) {
        std::ofstream out(sel_report);
        write_balance_report(out, balance_report(table, subset));
      }
    } else if (*comb) {
      const DatasetView data = load_dataset(comb_data);
      const SubsetIndices subset = load_subset(comb_subset);
      const auto mode = nearest ? Interpolation::nearest : Interpolation::bilinear;
      const CompressedDataset compressed =
          build_compressed_dataset(data, subset, grid, ipc_out, mode);
      write_compressed_dataset(compressed, comb_out);
      print_storage(storage_report(compressed));
    } else if (*preview) {
      const RunConfig config = config_or_default(prev_config);
      PipelineConfig pipeline = config.augment;
      DatasetView view;
      if (!prev_compressed.empty()) {
        const CompressedDataset compressed = read_compressed_dataset(prev_compressed);
        pipeline.grid_k = compressed.grid.k;
        view = compressed.as_view();
      } else if (!prev_data.empty()) {
        view = load_dataset(prev_data);
        pipeline.grid_k = 1;
        pipeline.patch = PatchMode::none;
      } else {
        throw InvalidArgument("augment-preview needs --data or --compressed");
      }
      fs::create_directories(prev_out);
      const int n = std::min<int>(prev_count, static_cast<int>(view.size()));
      for (int i = 0; i < n; ++i) {
        const auto& s = view.samples[static_cast<std::size_t>(i)];
        RandomStream stream = augment_stream(prev_seed, 0, s.sample_id);
        std::optional<MixPartner> partner;
        if (view.size() > 1) {
          const auto& other = view.samples[static_cast<std::size_t>((i + 1) % view.size())];
          partner = MixPartner{&other.image, other.label};
        }
        const AugmentedSample out =
            apply_pipeline(s.image, s.label, view.num_classes, pipeline, stream, partner);
        write_ppm(s.image, fs::path(prev_out) / fmt::format("{:03}_before.ppm", i));
        write_ppm(out.image, fs::path(prev_out) / fmt::format("{:03}_after.ppm", i));
      }
      std::cout << fmt::format("wrote {} pairs to {}\n", n, prev_out);
    } else if (*lab) {
      lab_options.seeds = {lab_seed};
      for (const auto& f :
           run_table_experiments("entropy-lab", config_or_default(lab_config), lab_out,
                                 lab_options)) {
        std::cout << f.string() << "\n";
      }
    } else if (*ev) {
      const RunConfig config = config_or_default(ev_config);
      EvalConfig eval = config.eval;
      eval.pipeline = config.augment;
      DatasetView train;
      if (!ev_compressed.empty()) {
        const CompressedDataset compressed = read_compressed_dataset(ev_compressed);
        eval.pipeline.grid_k = compressed.grid.k;
        train = compressed.as_view();
        train.name = compressed.provenance;
      } else if (!ev_train.empty()) {
        train = load_dataset(ev_train);
        eval.pipeline.grid_k = 1;
        eval.pipeline.patch = PatchMode::none;
      } else {
        throw InvalidArgument("eval needs --train or --compressed");
      }
      RunReport report = evaluate_hard_label(train, load_dataset(ev_test), eval);
      report.label = "eval";
      report.config_hash = config_hash(config);
      write_run_reports(std::cout, {report});
      if (!ev_report.empty()) append_run_report(ev_report, report);
    } else if (*pca) {
      RunConfig config = config_or_default(pca_config);
      if (pca_seed) config = config.with_root_seed(*pca_seed);
      const DeskSplit split = load_split(config);
      PcaOptions options;
      options.output_dir = fs::path(pca_out);
      const PcaResult result = run_pca(split, config, options);
      {
        std::ofstream out(fs::path(pca_out) / "run_config.txt");
        out << render_run_config(config);
      }
      append_run_report(fs::path(pca_out) / "report.csv", result.report);
      {
        std::ofstream out(fs::path(pca_out) / "cost.csv");
        write_cost_report(out, cost_report(result.report));
      }
      std::vector<RunReport> reports{result.report};
      if (ladder) {
        const ScoreTable scores = load_scores(fs::path(pca_out) / "scores.csv");
        for (auto& r : run_ablation_ladder(split, config, scores)) {
          append_run_report(fs::path(pca_out) / "ladder.csv", r);
          reports.push_back(std::move(r));
        }
      }
      write_run_reports(std::cout, reports);
      write_cost_report(std::cout, cost_report(result.report));
    } else if (*tables) {
      for (const auto& f :
           run_table_experiments(table_tag, config_or_default(table_config), table_out,
                                 table_options)) {
        std::cout << f.string() << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "dscomp: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
