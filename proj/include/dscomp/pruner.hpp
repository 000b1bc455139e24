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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dscomp/dynamics.hpp"

namespace dscomp {

enum class Metric { el2n, forgetting, aum, random };
enum class Direction { easy, hard };

std::string_view to_string(Metric metric) noexcept;
std::string_view to_string(Direction direction) noexcept;
Metric parse_metric(std::string_view text);
Direction parse_direction(std::string_view text);

/// Difficulty of a row under `metric`: larger is harder. AUM is negated
/// (a high margin is easy); random has no difficulty and returns 0.
double difficulty(const ScoreRow& row, Metric metric) noexcept;

struct SelectionSpec {
  Metric metric = Metric::el2n;
  Direction direction = Direction::easy;
  int ipc = 1;
  bool balanced = true;
  std::uint64_t seed = 0;
  /// Break score ties by a seeded hash of the id instead of ascending id.
  bool random_tie_break = false;

  std::string describe() const;
};

/// Coverage-centric selection: drop the hardest fraction, then sample
/// evenly across equal-width score strata.
struct CcsSpec {
  Metric base_metric = Metric::aum;
  double mislabeled_fraction = 0.3;
  int num_strata = 5;
  int ipc = 1;
  std::uint64_t seed = 0;

  std::string describe() const;
};

struct SubsetIndices {
  /// Grouped by ascending class; inside a class, in selection order (the
  /// best-ranked sample first).
  std::vector<SampleId> ids;
  std::string provenance;
};

/// Exactly `spec.ipc` ids per class. Throws InsufficientPopulation naming the
/// first class with fewer rows.
SubsetIndices select_balanced(const ScoreTable& table, const SelectionSpec& spec);

/// Global top `total_count` regardless of class, in ranking order.
SubsetIndices select_unbalanced(const ScoreTable& table, const SelectionSpec& spec,
                                std::size_t total_count);

/// Per-stratum sample counts of one class, for diagnostics and tests.
struct CcsClassTrace {
  int label = 0;
  std::size_t pool_size = 0;  // after dropping the hardest fraction
  std::vector<std::size_t> stratum_sizes;
  std::vector<std::size_t> drawn;
};

SubsetIndices ccs_select(const ScoreTable& table, const CcsSpec& spec,
                         std::vector<CcsClassTrace>* trace = nullptr);

/// Quota of every stratum before redistribution: ceil(ipc/k) for the first
/// ipc mod k strata, floor(ipc/k) for the rest.
std::vector<std::size_t> stratum_quotas(int ipc, int num_strata);

struct ClassBalance {
  int label = 0;
  std::size_t count = 0;
  double score_mean = 0.0;
  double score_min = 0.0;
  double score_max = 0.0;
  /// Rows of this class in the table with zero forgetting events.
  std::size_t zero_forgetting = 0;
};

struct BalanceReport {
  Metric metric = Metric::el2n;
  std::vector<ClassBalance> classes;
  /// Rows in the whole table with zero forgetting events.
  std::size_t zero_forgetting_ties = 0;
  /// Some class had zero-forgetting samples selected while its zero tie set
  /// is larger than the number selected from it: the choice inside the tie
  /// set is arbitrary, so another seed could pick a different subset.
  bool degeneracy_warning = false;
};

/// Per-class counts and score statistics of `subset` under `metric`
/// (random reports EL2N statistics).
BalanceReport balance_report(const ScoreTable& table, const SubsetIndices& subset,
                             Metric metric = Metric::forgetting);

void write_balance_report(std::ostream& out, const BalanceReport& report);

/// Subset file: `# subset <provenance>` followed by one id per line.
void save_subset(const SubsetIndices& subset, const std::filesystem::path& path);
SubsetIndices load_subset(const std::filesystem::path& path);

}  // namespace dscomp
