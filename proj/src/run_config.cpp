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

#include "dscomp/run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>

#include <fmt/format.h>

#include "dscomp/error.hpp"
#include "dscomp/random.hpp"

namespace dscomp {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& field, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw FormatError(field, "'" + text + "' is not a valid number");
  }
  return value;
}

bool parse_bool(const std::string& field, const std::string& text) {
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  throw FormatError(field, "'" + text + "' is not a boolean");
}

Interpolation parse_interpolation(const std::string& field, const std::string& text) {
  if (text == "bilinear") return Interpolation::bilinear;
  if (text == "nearest") return Interpolation::nearest;
  throw FormatError(field, "'" + text + "' is not bilinear or nearest");
}

std::string_view to_string(Interpolation mode) {
  return mode == Interpolation::nearest ? "nearest" : "bilinear";
}

// Wraps the enum parsers so their InvalidArgument surfaces as a FormatError
// naming the key.
template <typename F>
auto keyed(const std::string& field, F&& parse) -> decltype(parse()) {
  try {
    return parse();
  } catch (const InvalidArgument& e) {
    throw FormatError(field, e.what());
  }
}

using Setter = std::function<void(RunConfig&, const std::string& field, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const auto table = [] {
    std::map<std::string, std::map<std::string, Setter>> t;
#define DSCOMP_INT(sec, key, member) \
  t[sec][key] = [](RunConfig& c, const std::string& f, const std::string& v) { \
    c.member = parse_number<int>(f, v);                                         \
  }
#define DSCOMP_U64(sec, key, member) \
  t[sec][key] = [](RunConfig& c, const std::string& f, const std::string& v) { \
    c.member = parse_number<std::uint64_t>(f, v);                               \
  }
#define DSCOMP_REAL(sec, key, member) \
  t[sec][key] = [](RunConfig& c, const std::string& f, const std::string& v) { \
    c.member = parse_number<double>(f, v);                                      \
  }
#define DSCOMP_BOOL(sec, key, member) \
  t[sec][key] = [](RunConfig& c, const std::string& f, const std::string& v) { \
    c.member = parse_bool(f, v);                                                \
  }
    DSCOMP_INT("dataset", "classes", dataset.classes);
    DSCOMP_INT("dataset", "train_per_class", dataset.train_per_class);
    DSCOMP_INT("dataset", "test_per_class", dataset.test_per_class);
    DSCOMP_INT("dataset", "side", dataset.side);
    DSCOMP_U64("dataset", "seed", dataset.seed);
    t["dataset"]["dir"] = [](RunConfig& c, const std::string&, const std::string& v) {
      c.dataset.dir = v;
    };

    DSCOMP_INT("score", "epochs", score.train.epochs);
    DSCOMP_INT("score", "batch_size", score.train.batch_size);
    DSCOMP_REAL("score", "learning_rate", score.train.learning_rate);
    DSCOMP_U64("score", "seed", score.train.seed);
    DSCOMP_INT("score", "early_window", score.train.early_window);
    DSCOMP_INT("score", "hidden_dim", score.train.hidden_dim);
    t["score"]["file"] = [](RunConfig& c, const std::string&, const std::string& v) {
      c.score.file = v;
    };

    DSCOMP_BOOL("select", "enabled", select.enabled);
    t["select"]["metric"] = [](RunConfig& c, const std::string& f, const std::string& v) {
      c.select.metric = keyed(f, [&] { return parse_metric(v); });
    };
    t["select"]["direction"] = [](RunConfig& c, const std::string& f, const std::string& v) {
      c.select.direction = keyed(f, [&] { return parse_direction(v); });
    };
    DSCOMP_BOOL("select", "balanced", select.balanced);
    DSCOMP_BOOL("select", "random_tie_break", select.random_tie_break);
    DSCOMP_INT("select", "ipc", select.ipc);
    DSCOMP_U64("select", "seed", select.seed);

    DSCOMP_BOOL("combine", "enabled", combine.enabled);
    DSCOMP_INT("combine", "k", combine.k);
    DSCOMP_INT("combine", "cell_side", combine.cell_side);

    t["augment"]["patch"] = [](RunConfig& c, const std::string& f, const std::string& v) {
      c.augment.patch = keyed(f, [&] { return parse_patch_mode(v); });
    };
    DSCOMP_BOOL("augment", "crop", augment.crop_enabled);
    DSCOMP_REAL("augment", "crop_min", augment.crop.r_min);
    DSCOMP_REAL("augment", "crop_max", augment.crop.r_max);
    DSCOMP_REAL("augment", "aspect_min", augment.crop.aspect_min);
    DSCOMP_REAL("augment", "aspect_max", augment.crop.aspect_max);
    DSCOMP_INT("augment", "out_side", augment.crop.out_side);
    DSCOMP_BOOL("augment", "flip", augment.flip_enabled);
    DSCOMP_REAL("augment", "flip_prob", augment.flip_prob);
    t["augment"]["mix"] = [](RunConfig& c, const std::string& f, const std::string& v) {
      c.augment.mix.kind = keyed(f, [&] { return parse_mix_kind(v); });
    };
    DSCOMP_REAL("augment", "mix_prob", augment.mix.probability);
    DSCOMP_BOOL("augment", "label_mixing", augment.mix.label_mixing);
    DSCOMP_REAL("augment", "cutout_fraction", augment.mix.cutout_fraction);
    DSCOMP_REAL("augment", "beta_alpha", augment.mix.beta_alpha);
    t["augment"]["interpolation"] = [](RunConfig& c, const std::string& f,
                                       const std::string& v) {
      c.augment.interpolation = parse_interpolation(f, v);
    };

    t["eval"]["preset"] = [](RunConfig& c, const std::string& f, const std::string& v) {
      const PipelineConfig keep = c.eval.pipeline;
      c.eval = keyed(f, [&] { return eval_preset(v, c.dataset.side); });
      c.eval.pipeline = keep;
    };
    DSCOMP_INT("eval", "epochs", eval.epochs);
    DSCOMP_INT("eval", "batch_size", eval.batch_size);
    DSCOMP_REAL("eval", "learning_rate", eval.learning_rate);
    t["eval"]["optimizer"] = [](RunConfig& c, const std::string&, const std::string& v) {
      c.eval.optimizer = v;
    };
    DSCOMP_U64("eval", "seed", eval.seed);
    DSCOMP_INT("eval", "hidden_dim", eval.hidden_dim);
#undef DSCOMP_INT
#undef DSCOMP_U64
#undef DSCOMP_REAL
#undef DSCOMP_BOOL
    return t;
  }();
  return table;
}

}  // namespace

void EvalConfig::validate() const {
  if (optimizer != "plain_sgd") {
    throw InvalidArgument("optimizer '" + optimizer + "' is not executable (only plain_sgd)");
  }
  train_config().validate();
  pipeline.validate();
}

TrainConfig EvalConfig::train_config() const {
  TrainConfig t;
  t.epochs = epochs;
  t.batch_size = batch_size;
  t.learning_rate = learning_rate;
  t.seed = seed;
  t.hidden_dim = hidden_dim;
  t.early_window = 1;
  return t;
}

EvalConfig EvalConfig::standard_desk(int out_side) {
  const auto& rec = eval_preset_record("standard-desk");
  EvalConfig c;
  c.epochs = rec.epochs;
  c.batch_size = rec.batch_size;
  c.learning_rate = rec.learning_rate;
  c.optimizer = rec.optimizer;
  c.pipeline = PipelineConfig::crop_flip(out_side);
  return c;
}

const EvalPresetRecord& eval_preset_record(std::string_view name) {
  static const EvalPresetRecord desk{"standard-desk", 300, 32, 0.05, "plain_sgd", true};
  static const EvalPresetRecord imagenet{"standard-imagenet", 300, 128, 0.001, "adamw", false};
  if (name == desk.name) return desk;
  if (name == imagenet.name) return imagenet;
  throw InvalidArgument("unknown evaluation preset '" + std::string(name) +
                        "' (expected standard-desk or standard-imagenet)");
}

EvalConfig eval_preset(std::string_view name, int out_side) {
  const auto& rec = eval_preset_record(name);
  if (!rec.executable) {
    throw InvalidArgument("evaluation preset '" + rec.name +
                          "' is informational and cannot be run on the toy model");
  }
  return EvalConfig::standard_desk(out_side);
}

void RunConfig::validate() const {
  if (dataset.classes < 2) throw InvalidArgument("dataset.classes must be >= 2");
  if (dataset.train_per_class < 1 || dataset.test_per_class < 1) {
    throw InvalidArgument("dataset sample counts must be >= 1");
  }
  if (dataset.side < 1) throw InvalidArgument("dataset.side must be >= 1");
  score.train.validate();
  if (select.ipc < 1) throw InvalidArgument("select.ipc must be >= 1");
  if (combine.enabled) {
    grid().validate();
    if (!select.balanced) {
      throw InvalidArgument("combining requires a balanced selection");
    }
  }
  augment.validate();
  eval.validate();
}

GridSpec RunConfig::grid() const {
  if (!combine.enabled) return GridSpec{1, dataset.side};
  const int cell = combine.cell_side > 0 ? combine.cell_side : dataset.side / combine.k;
  return GridSpec{combine.k, cell};
}

int RunConfig::sources_per_class() const { return select.ipc * grid().cells(); }

RunConfig RunConfig::with_root_seed(std::uint64_t seed) const {
  RunConfig c = *this;
  c.select.seed = seed;
  c.eval.seed = seed;
  return c;
}

RunConfig parse_run_config(std::istream& in, const std::string& source) {
  RunConfig config;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = fmt::format("{}:{}", source, line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw FormatError(where, "unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!setters().count(section)) {
        throw FormatError(where, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(where, "expected key = value");
    if (section.empty()) throw FormatError(where, "key outside of any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto& keys = setters().at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) {
      throw FormatError(where, "unknown key '" + key + "' in [" + section + "]");
    }
    it->second(config, where + " " + section + "." + key, value);
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open run config " + path.string());
  return parse_run_config(in, path.string());
}

std::string render_run_config(const RunConfig& c) {
  const auto b = [](bool v) { return v ? "true" : "false"; };
  std::string out;
  out += "[dataset]\n";
  out += fmt::format("classes = {}\ntrain_per_class = {}\ntest_per_class = {}\n", c.dataset.classes,
                     c.dataset.train_per_class, c.dataset.test_per_class);
  out += fmt::format("side = {}\nseed = {}\n", c.dataset.side, c.dataset.seed);
  if (!c.dataset.dir.empty()) out += fmt::format("dir = {}\n", c.dataset.dir.string());
  out += "\n[score]\n";
  out += fmt::format("epochs = {}\nbatch_size = {}\nlearning_rate = {}\nseed = {}\n",
                     c.score.train.epochs, c.score.train.batch_size, c.score.train.learning_rate,
                     c.score.train.seed);
  out += fmt::format("early_window = {}\nhidden_dim = {}\n", c.score.train.early_window,
                     c.score.train.hidden_dim);
  if (!c.score.file.empty()) out += fmt::format("file = {}\n", c.score.file.string());
  out += "\n[select]\n";
  out += fmt::format("enabled = {}\nmetric = {}\ndirection = {}\nbalanced = {}\n",
                     b(c.select.enabled), to_string(c.select.metric),
                     to_string(c.select.direction), b(c.select.balanced));
  out += fmt::format("random_tie_break = {}\nipc = {}\nseed = {}\n", b(c.select.random_tie_break),
                     c.select.ipc, c.select.seed);
  out += "\n[combine]\n";
  out += fmt::format("enabled = {}\nk = {}\ncell_side = {}\n", b(c.combine.enabled), c.combine.k,
                     c.combine.cell_side);
  const auto& a = c.augment;
  out += "\n[augment]\n";
  out += fmt::format("patch = {}\ncrop = {}\ncrop_min = {}\ncrop_max = {}\n", to_string(a.patch),
                     b(a.crop_enabled), a.crop.r_min, a.crop.r_max);
  out += fmt::format("aspect_min = {}\naspect_max = {}\nout_side = {}\n", a.crop.aspect_min,
                     a.crop.aspect_max, a.crop.out_side);
  out += fmt::format("flip = {}\nflip_prob = {}\nmix = {}\nmix_prob = {}\n", b(a.flip_enabled),
                     a.flip_prob, to_string(a.mix.kind), a.mix.probability);
  out += fmt::format("label_mixing = {}\ncutout_fraction = {}\nbeta_alpha = {}\n",
                     b(a.mix.label_mixing), a.mix.cutout_fraction, a.mix.beta_alpha);
  out += fmt::format("interpolation = {}\n", to_string(a.interpolation));
  out += "\n[eval]\n";
  out += fmt::format("epochs = {}\nbatch_size = {}\nlearning_rate = {}\noptimizer = {}\n",
                     c.eval.epochs, c.eval.batch_size, c.eval.learning_rate, c.eval.optimizer);
  out += fmt::format("seed = {}\nhidden_dim = {}\n", c.eval.seed, c.eval.hidden_dim);
  return out;
}

std::string config_hash(const RunConfig& config) {
  return fmt::format("{:016x}", mix64(hash_tag(render_run_config(config))));
}

}  // namespace dscomp
