// Copyright 2026 The kgneg Authors.
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

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kgneg/dataset_stats.hpp"
#include "kgneg/error.hpp"
#include "kgneg/metrics.hpp"
#include "kgneg/model.hpp"
#include "kgneg/parallel.hpp"
#include "kgneg/triple_store.hpp"

namespace kgneg {

enum class RankMode : std::uint8_t { kRaw, kFiltered };

struct RankingResult {
  Triple triple;
  std::size_t target_rank = 0;
  std::size_t source_rank = 0;
};

namespace detail {

template <typename IsKnown>
std::size_t rank_open_slot(const std::vector<double>& scores, EntityId truth, IsKnown&& is_known) {
  const double pos = scores[truth];
  std::size_t rank = 1;
  for (EntityId e = 0; e < scores.size(); ++e) {
    if (e == truth || is_known(e)) continue;
    if (scores[e] >= pos) ++rank;
  }
  return rank;
}

}  // namespace detail

// Ranks the true target among all entities for (s, r, ?) and the true
// source for (?, r, t). Filtered mode drops every other entity completing a
// triple in `filter`.
inline RankingResult rank_triple(const ModelParams& p, const TripleStore& store, const Triple& t, SplitMask filter,
                                 RankMode mode = RankMode::kFiltered) {
  const bool filtered = mode == RankMode::kFiltered;
  RankingResult out{t, 0, 0};
  const auto target_scores = score_all(p, {t.source, t.relation, Direction::kPredictTarget});
  out.target_rank = detail::rank_open_slot(target_scores, t.target, [&](EntityId e) {
    return filtered && store.contains({t.source, t.relation, e}, filter);
  });
  const auto source_scores = score_all(p, {t.target, t.relation, Direction::kPredictSource});
  out.source_rank = detail::rank_open_slot(source_scores, t.source, [&](EntityId e) {
    return filtered && store.contains({e, t.relation, t.target}, filter);
  });
  return out;
}

struct SliceMetrics {
  double mrr = 0.0;
  std::map<std::size_t, double> hits;
  std::size_t n_ranks = 0;
};

struct MetricsReport {
  double mrr = 0.0;
  std::map<std::size_t, double> hits;
  std::map<int, SliceMetrics> per_slice;  // keyed by oom group; -1 = relation unseen in train
  std::size_t n_evaluated = 0;           // triples; each contributes two ranks
  HitsComparator comparator = HitsComparator::kInclusive;
  std::string config_fingerprint;
  std::vector<RankingResult> rankings;
};

struct EvalOptions {
  std::vector<std::size_t> ks{1, 3, 10};
  HitsComparator comparator = HitsComparator::kInclusive;
  SplitMask filter = kAllSplits;
  RankMode mode = RankMode::kFiltered;
  std::size_t threads = 0;  // 0 = hardware concurrency
};

inline SliceMetrics summarize(std::span<const std::size_t> ranks, const EvalOptions& opts) {
  SliceMetrics m;
  m.n_ranks = ranks.size();
  m.mrr = mrr(ranks);
  for (std::size_t k : opts.ks) m.hits[k] = hits_at_k(ranks, k, opts.comparator);
  return m;
}

// Target and source ranks are pooled into one list. When stats are given,
// ranks are also grouped by their relation's order-of-magnitude slice.
inline MetricsReport evaluate(const ModelParams& p, const TripleStore& store, std::span<const Triple> triples,
                              const DatasetStats* stats, const EvalOptions& opts = {}) {
  if (triples.empty()) throw Error("evaluate: no triples to rank");
  MetricsReport report;
  report.comparator = opts.comparator;
  report.n_evaluated = triples.size();
  report.rankings.resize(triples.size());
  parallel_for(triples.size(), opts.threads,
               [&](std::size_t i) { report.rankings[i] = rank_triple(p, store, triples[i], opts.filter, opts.mode); });

  std::vector<std::size_t> all;
  std::map<int, std::vector<std::size_t>> by_slice;
  all.reserve(2 * triples.size());
  for (const auto& r : report.rankings) {
    all.push_back(r.target_rank);
    all.push_back(r.source_rank);
    if (stats) {
      const int g = stats->group_of(r.triple.relation).value_or(-1);
      auto& slice = by_slice[g];
      slice.push_back(r.target_rank);
      slice.push_back(r.source_rank);
    }
  }
  const auto overall = summarize(all, opts);
  report.mrr = overall.mrr;
  report.hits = overall.hits;
  for (const auto& [g, ranks] : by_slice) report.per_slice[g] = summarize(ranks, opts);
  return report;
}

inline MetricsReport evaluate(const ModelParams& p, const TripleStore& store, Split split, const DatasetStats& stats,
                              const EvalOptions& opts = {}) {
  return evaluate(p, store, store.split(split), &stats, opts);
}

}  // namespace kgneg
