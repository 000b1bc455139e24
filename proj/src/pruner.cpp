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

#include "dscomp/pruner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "dscomp/error.hpp"
#include "dscomp/random.hpp"

namespace dscomp {

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::el2n: return "el2n";
    case Metric::forgetting: return "forgetting";
    case Metric::aum: return "aum";
    case Metric::random: return "random";
  }
  return "?";
}

std::string_view to_string(Direction direction) noexcept {
  return direction == Direction::easy ? "easy" : "hard";
}

Metric parse_metric(std::string_view text) {
  if (text == "el2n") return Metric::el2n;
  if (text == "forgetting") return Metric::forgetting;
  if (text == "aum") return Metric::aum;
  if (text == "random") return Metric::random;
  throw InvalidArgument("unknown metric '" + std::string(text) +
                        "' (expected el2n, forgetting, aum or random)");
}

Direction parse_direction(std::string_view text) {
  if (text == "easy") return Direction::easy;
  if (text == "hard") return Direction::hard;
  throw InvalidArgument("unknown direction '" + std::string(text) + "' (expected easy or hard)");
}

double difficulty(const ScoreRow& row, Metric metric) noexcept {
  switch (metric) {
    case Metric::el2n: return row.el2n;
    case Metric::forgetting: return static_cast<double>(row.forgetting);
    case Metric::aum: return -row.aum;
    case Metric::random: return 0.0;
  }
  return 0.0;
}

std::string SelectionSpec::describe() const {
  return fmt::format("metric={} direction={} ipc={} balanced={} seed={} random_tie_break={}",
                     to_string(metric), to_string(direction), ipc, balanced ? 1 : 0, seed,
                     random_tie_break ? 1 : 0);
}

std::string CcsSpec::describe() const {
  return fmt::format("ccs base_metric={} mislabeled_fraction={} num_strata={} ipc={} seed={}",
                     to_string(base_metric), mislabeled_fraction, num_strata, ipc, seed);
}

namespace {

struct Ranked {
  double key;
  std::uint64_t tie;
  SampleId id;
};

bool ranked_less(const Ranked& a, const Ranked& b) {
  if (a.key != b.key) return a.key < b.key;
  if (a.tie != b.tie) return a.tie < b.tie;
  return a.id < b.id;
}

void check_table(const ScoreTable& table) {
  std::unordered_set<SampleId> seen;
  for (const auto& r : table.rows) {
    if (r.label < 0) throw InvalidArgument("negative label in score table");
    if (!seen.insert(r.sample_id).second) {
      throw InvalidArgument("duplicate sample_id " + std::to_string(r.sample_id) +
                            " in score table");
    }
  }
}

// Rows ordered best-first for (metric, direction). Random metric: seeded
// permutation of the rows sorted by id, so input row order never matters.
std::vector<SampleId> rank_rows(std::vector<const ScoreRow*> rows, const SelectionSpec& spec,
                                std::string_view stream_tag, std::uint64_t stream_id) {
  std::vector<SampleId> out;
  out.reserve(rows.size());
  if (spec.metric == Metric::random) {
    std::sort(rows.begin(), rows.end(),
              [](const ScoreRow* a, const ScoreRow* b) { return a->sample_id < b->sample_id; });
    for (const auto* r : rows) out.push_back(r->sample_id);
    RandomStream rs = RandomStream::derive(spec.seed, stream_tag, stream_id);
    std::shuffle(out.begin(), out.end(), rs.engine());
    return out;
  }
  std::vector<Ranked> ranked;
  ranked.reserve(rows.size());
  const double sign = spec.direction == Direction::easy ? 1.0 : -1.0;
  for (const auto* r : rows) {
    const std::uint64_t tie =
        spec.random_tie_break ? derive_seed(spec.seed, "tie-break", r->sample_id) : 0;
    ranked.push_back({sign * difficulty(*r, spec.metric), tie, r->sample_id});
  }
  std::sort(ranked.begin(), ranked.end(), ranked_less);
  for (const auto& r : ranked) out.push_back(r.id);
  return out;
}

std::map<int, std::vector<const ScoreRow*>> rows_by_class(const ScoreTable& table) {
  std::map<int, std::vector<const ScoreRow*>> by_class;
  for (const auto& r : table.rows) by_class[r.label].push_back(&r);
  return by_class;
}

}  // namespace

SubsetIndices select_balanced(const ScoreTable& table, const SelectionSpec& spec) {
  check_table(table);
  if (spec.ipc < 1) throw InvalidArgument("ipc must be >= 1");
  const int classes = table.num_classes();
  auto by_class = rows_by_class(table);
  SubsetIndices subset;
  subset.provenance = "select_balanced " + spec.describe();
  for (int c = 0; c < classes; ++c) {
    const auto& rows = by_class[c];
    if (rows.size() < static_cast<std::size_t>(spec.ipc)) {
      throw InsufficientPopulation(
          c, fmt::format("class {} has {} rows, fewer than ipc={}", c, rows.size(), spec.ipc));
    }
    auto ranked = rank_rows(rows, spec, "select-random", static_cast<std::uint64_t>(c));
    subset.ids.insert(subset.ids.end(), ranked.begin(), ranked.begin() + spec.ipc);
  }
  return subset;
}

SubsetIndices select_unbalanced(const ScoreTable& table, const SelectionSpec& spec,
                                std::size_t total_count) {
  check_table(table);
  if (total_count > table.rows.size()) {
    throw InvalidArgument(fmt::format("total_count {} exceeds table size {}", total_count,
                                      table.rows.size()));
  }
  std::vector<const ScoreRow*> rows;
  rows.reserve(table.rows.size());
  for (const auto& r : table.rows) rows.push_back(&r);
  auto ranked = rank_rows(std::move(rows), spec, "select-random-global", 0);
  SubsetIndices subset;
  subset.provenance = fmt::format("select_unbalanced {} total={}", spec.describe(), total_count);
  subset.ids.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(total_count));
  return subset;
}

std::vector<std::size_t> stratum_quotas(int ipc, int num_strata) {
  if (ipc < 0 || num_strata < 1) throw InvalidArgument("invalid quota request");
  std::vector<std::size_t> quotas(num_strata, static_cast<std::size_t>(ipc / num_strata));
  for (int s = 0; s < ipc % num_strata; ++s) ++quotas[s];
  return quotas;
}

SubsetIndices ccs_select(const ScoreTable& table, const CcsSpec& spec,
                         std::vector<CcsClassTrace>* trace) {
  check_table(table);
  if (spec.ipc < 1) throw InvalidArgument("ipc must be >= 1");
  if (spec.num_strata < 1) throw InvalidArgument("num_strata must be >= 1");
  if (!(spec.mislabeled_fraction >= 0.0 && spec.mislabeled_fraction < 1.0)) {
    throw InvalidArgument("mislabeled_fraction must lie in [0, 1)");
  }
  if (spec.base_metric == Metric::random) throw InvalidArgument("CCS needs a score metric");

  const int classes = table.num_classes();
  auto by_class = rows_by_class(table);
  SubsetIndices subset;
  subset.provenance = spec.describe();
  if (trace) trace->clear();

  for (int c = 0; c < classes; ++c) {
    // Easiest first.
    std::vector<Ranked> ranked;
    for (const auto* r : by_class[c]) {
      ranked.push_back({difficulty(*r, spec.base_metric), 0, r->sample_id});
    }
    std::sort(ranked.begin(), ranked.end(), ranked_less);
    const auto drop = static_cast<std::size_t>(
        std::floor(spec.mislabeled_fraction * static_cast<double>(ranked.size()) + 1e-9));
    ranked.resize(ranked.size() - drop);
    if (ranked.size() < static_cast<std::size_t>(spec.ipc)) {
      throw InsufficientPopulation(
          c, fmt::format("class {} keeps {} rows after pruning {}, fewer than ipc={}", c,
                         ranked.size(), drop, spec.ipc));
    }

    const int k = spec.num_strata;
    std::vector<std::vector<SampleId>> strata(k);
    const double lo = ranked.front().key;
    const double hi = ranked.back().key;
    for (const auto& r : ranked) {
      int s = 0;
      if (hi > lo) {
        s = std::min(k - 1, static_cast<int>(std::floor((r.key - lo) / (hi - lo) * k)));
      }
      strata[s].push_back(r.id);
    }
    for (int s = 0; s < k; ++s) {
      RandomStream rs = RandomStream::derive(
          spec.seed, "ccs", (static_cast<std::uint64_t>(c) << 20) | static_cast<unsigned>(s));
      std::shuffle(strata[s].begin(), strata[s].end(), rs.engine());
    }

    const auto quotas = stratum_quotas(spec.ipc, k);
    std::vector<std::size_t> drawn(k, 0);
    std::size_t carry = 0;
    for (int s = 0; s < k; ++s) {
      const std::size_t want = quotas[s] + carry;
      drawn[s] = std::min(want, strata[s].size());
      carry = want - drawn[s];
    }
    // Shortfall left after the last stratum wraps around to earlier strata.
    for (int s = 0; s < k && carry > 0; ++s) {
      const std::size_t extra = std::min(carry, strata[s].size() - drawn[s]);
      drawn[s] += extra;
      carry -= extra;
    }
    if (carry > 0) {
      throw InsufficientPopulation(
          c, fmt::format("class {} stratum {}: quota infeasible by {} samples", c, k - 1, carry));
    }
    for (int s = 0; s < k; ++s) {
      subset.ids.insert(subset.ids.end(), strata[s].begin(),
                        strata[s].begin() + static_cast<std::ptrdiff_t>(drawn[s]));
    }
    if (trace) {
      CcsClassTrace t;
      t.label = c;
      t.pool_size = ranked.size();
      for (const auto& st : strata) t.stratum_sizes.push_back(st.size());
      t.drawn = drawn;
      trace->push_back(std::move(t));
    }
  }
  return subset;
}

BalanceReport balance_report(const ScoreTable& table, const SubsetIndices& subset,
                             Metric metric) {
  check_table(table);
  std::unordered_map<SampleId, const ScoreRow*> by_id;
  for (const auto& r : table.rows) by_id[r.sample_id] = &r;

  BalanceReport report;
  report.metric = metric;
  const int classes = table.num_classes();
  report.classes.resize(classes);
  for (int c = 0; c < classes; ++c) report.classes[c].label = c;
  for (const auto& r : table.rows) {
    if (r.forgetting == 0) {
      ++report.zero_forgetting_ties;
      ++report.classes[r.label].zero_forgetting;
    }
  }

  const Metric shown = metric == Metric::random ? Metric::el2n : metric;
  auto raw_score = [shown](const ScoreRow& r) {
    return shown == Metric::aum ? r.aum : difficulty(r, shown);
  };
  std::vector<double> sums(classes, 0.0);
  std::vector<bool> has_zero_selected(classes, false);
  std::unordered_set<SampleId> seen;
  for (SampleId id : subset.ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw InvalidArgument("subset id " + std::to_string(id) + " not in score table");
    }
    if (!seen.insert(id).second) {
      throw InvalidArgument("duplicate id " + std::to_string(id) + " in subset");
    }
    const ScoreRow& r = *it->second;
    auto& cb = report.classes[r.label];
    const double v = raw_score(r);
    if (cb.count == 0) {
      cb.score_min = cb.score_max = v;
    } else {
      cb.score_min = std::min(cb.score_min, v);
      cb.score_max = std::max(cb.score_max, v);
    }
    ++cb.count;
    sums[r.label] += v;
    if (r.forgetting == 0) has_zero_selected[r.label] = true;
  }
  for (int c = 0; c < classes; ++c) {
    auto& cb = report.classes[c];
    if (cb.count > 0) cb.score_mean = sums[c] / static_cast<double>(cb.count);
    if (has_zero_selected[c] && cb.zero_forgetting > cb.count) report.degeneracy_warning = true;
  }
  return report;
}

void write_balance_report(std::ostream& out, const BalanceReport& report) {
  out << "# balance metric=" << to_string(report.metric)
      << " zero_forgetting_ties=" << report.zero_forgetting_ties
      << " degeneracy_warning=" << (report.degeneracy_warning ? 1 : 0) << "\n";
  out << "label,count,score_mean,score_min,score_max,zero_forgetting\n";
  for (const auto& c : report.classes) {
    out << fmt::format("{},{},{:.9g},{:.9g},{:.9g},{}\n", c.label, c.count, c.score_mean,
                       c.score_min, c.score_max, c.zero_forgetting);
  }
}

void save_subset(const SubsetIndices& subset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << "# subset " << subset.provenance << "\n";
  for (SampleId id : subset.ids) out << id << "\n";
}

SubsetIndices load_subset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("# subset ", 0) != 0) {
    throw FormatError("subset", "missing '# subset' provenance header");
  }
  SubsetIndices subset;
  subset.provenance = line.substr(9);
  std::unordered_set<SampleId> seen;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    SampleId id = 0;
    try {
      std::size_t used = 0;
      id = std::stoull(line, &used);
      if (used != line.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::logic_error&) {
      throw FormatError("subset", "not a sample id: '" + line + "'");
    }
    if (!seen.insert(id).second) throw FormatError("subset", "duplicate id " + line);
    subset.ids.push_back(id);
  }
  return subset;
}

}  // namespace dscomp
