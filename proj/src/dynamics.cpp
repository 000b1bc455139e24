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

#include "dscomp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "dscomp/error.hpp"

namespace dscomp {

EpochRecord make_epoch_record(std::span<const float> logits, int label) {
  EpochRecord r;
  r.probs = softmax(logits);
  r.correct = argmax(logits) == label;
  float best_other = -std::numeric_limits<float>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (static_cast<int>(i) != label) best_other = std::max(best_other, logits[i]);
  }
  r.margin = static_cast<double>(logits[static_cast<std::size_t>(label)]) - best_other;
  return r;
}

DynamicsLog::DynamicsLog(std::vector<SampleId> ids, std::vector<int> labels, int num_classes)
    : ids_(std::move(ids)), labels_(std::move(labels)), num_classes_(num_classes) {
  if (ids_.size() != labels_.size()) throw InvalidArgument("ids and labels differ in length");
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw InvalidArgument("duplicate sample_id " + std::to_string(ids_[i]) + " in log");
    }
  }
}

void DynamicsLog::append_epoch(std::vector<EpochRecord> records) {
  if (records.size() != ids_.size()) {
    throw InvalidArgument("epoch has " + std::to_string(records.size()) + " records, log has " +
                          std::to_string(ids_.size()) + " samples");
  }
  epochs_.push_back(std::move(records));
}

std::size_t DynamicsLog::index_of(SampleId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw LookupError("sample_id " + std::to_string(id) + " not in log");
  return it->second;
}

bool DynamicsLog::operator==(const DynamicsLog& other) const {
  if (ids_ != other.ids_ || labels_ != other.labels_ || num_classes_ != other.num_classes_ ||
      epochs_.size() != other.epochs_.size()) {
    return false;
  }
  for (std::size_t e = 0; e < epochs_.size(); ++e) {
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      const auto& a = epochs_[e][i];
      const auto& b = other.epochs_[e][i];
      if (a.correct != b.correct || a.margin != b.margin || !(a.probs == b.probs)) return false;
    }
  }
  return true;
}

TrainResult train_with_dynamics(const DatasetView& dataset, const TrainConfig& config) {
  dataset.validate();
  config.validate();
  const std::size_t n = dataset.size();
  const int input_dim = static_cast<int>(dataset.samples.front().image.size());
  const int classes = dataset.num_classes;

  Eigen::MatrixXf features(input_dim, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(dataset.samples[i].image.size()) != input_dim) {
      throw InvalidArgument("dataset images differ in size");
    }
    features.col(static_cast<Eigen::Index>(i)) = image_features(dataset.samples[i].image);
  }

  std::vector<SampleId> ids;
  std::vector<int> labels;
  for (const auto& s : dataset.samples) {
    ids.push_back(s.sample_id);
    labels.push_back(s.label);
  }
  DynamicsLog log(ids, labels, classes);

  auto provider = [&](int, std::span<const std::size_t> indices, Eigen::MatrixXf& inputs,
                      Eigen::MatrixXf& targets) {
    targets.setZero();
    for (std::size_t j = 0; j < indices.size(); ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      inputs.col(col) = features.col(static_cast<Eigen::Index>(indices[j]));
      targets(labels[indices[j]], col) = 1.0f;
    }
  };
  auto observer = [&](int, const ToyModel& model) {
    const Eigen::MatrixXf z = model.logits(features);
    std::vector<EpochRecord> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto col = z.col(static_cast<Eigen::Index>(i));
      records.push_back(make_epoch_record(
          std::span<const float>(col.data(), static_cast<std::size_t>(col.size())), labels[i]));
    }
    log.append_epoch(std::move(records));
  };

  ToyModel model = train_model(n, input_dim, classes, config, provider, observer);
  return {std::move(model), std::move(log)};
}

double el2n(const DynamicsLog& log, SampleId id, int early_window) {
  const std::size_t row = log.index_of(id);
  if (early_window < 1 || early_window > log.epochs()) {
    throw InvalidArgument("early_window " + std::to_string(early_window) + " outside [1, " +
                          std::to_string(log.epochs()) + "]");
  }
  const int label = log.labels()[row];
  double total = 0.0;
  for (int e = 0; e < early_window; ++e) {
    const ProbVector& p = log.record(row, e).probs;
    double sq = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
      const double diff = p[c] - (static_cast<int>(c) == label ? 1.0 : 0.0);
      sq += diff * diff;
    }
    total += std::sqrt(sq);
  }
  return total / early_window;
}

int forgetting(const DynamicsLog& log, SampleId id) {
  const std::size_t row = log.index_of(id);
  int events = 0;
  for (int e = 1; e < log.epochs(); ++e) {
    if (log.record(row, e - 1).correct && !log.record(row, e).correct) ++events;
  }
  return events;
}

double aum(const DynamicsLog& log, SampleId id) {
  const std::size_t row = log.index_of(id);
  if (log.epochs() == 0) throw InvalidArgument("log has no epochs");
  double total = 0.0;
  for (int e = 0; e < log.epochs(); ++e) total += log.record(row, e).margin;
  return total / log.epochs();
}

int ScoreTable::num_classes() const noexcept {
  int top = -1;
  for (const auto& r : rows) top = std::max(top, r.label);
  return top + 1;
}

ScoreTable build_score_table(const DynamicsLog& log, int early_window) {
  ScoreTable table;
  table.rows.reserve(log.num_samples());
  for (std::size_t i = 0; i < log.num_samples(); ++i) {
    const SampleId id = log.sample_ids()[i];
    table.rows.push_back({id, log.labels()[i], el2n(log, id, early_window), forgetting(log, id),
                          aum(log, id)});
  }
  return table;
}

void write_scores(std::ostream& out, const ScoreTable& table) {
  out << "sample_id,label,el2n,forgetting,aum\n";
  for (const auto& r : table.rows) {
    out << fmt::format("{},{},{:.9g},{},{:.9g}\n", r.sample_id, r.label, r.el2n, r.forgetting,
                       r.aum);
  }
}

ScoreTable read_scores(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("scores", "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "sample_id,label,el2n,forgetting,aum") {
    throw FormatError("scores", "expected header 'sample_id,label,el2n,forgetting,aum'");
  }
  ScoreTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell[5];
    for (int k = 0; k < 5; ++k) {
      if (!std::getline(fields, cell[k], ',')) {
        throw FormatError("scores", "line " + std::to_string(line_no) + ": expected 5 columns");
      }
    }
    std::string extra;
    if (std::getline(fields, extra, ',')) {
      throw FormatError("scores", "line " + std::to_string(line_no) + ": too many columns");
    }
    try {
      ScoreRow r;
      r.sample_id = std::stoull(cell[0]);
      r.label = std::stoi(cell[1]);
      r.el2n = std::stod(cell[2]);
      r.forgetting = std::stoi(cell[3]);
      r.aum = std::stod(cell[4]);
      if (r.label < 0 || r.el2n < 0.0 || r.forgetting < 0) {
        throw FormatError("scores", "line " + std::to_string(line_no) + ": negative value");
      }
      table.rows.push_back(r);
    } catch (const std::logic_error&) {
      throw FormatError("scores", "line " + std::to_string(line_no) + ": unparsable number");
    }
  }
  return table;
}

void save_scores(const ScoreTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  write_scores(out, table);
}

ScoreTable load_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open for reading: " + path.string());
  return read_scores(in);
}

}  // namespace dscomp
