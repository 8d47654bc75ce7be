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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "test_util.hpp"

namespace kgneg {
namespace {

using testing::e;
using testing::r;

TEST(RankFromScores, PessimisticTies) {
  const double candidates[] = {0.9, 0.7, 0.3};
  EXPECT_EQ(rank_from_scores(0.7, candidates), 3u);
  EXPECT_EQ(rank_from_scores(0.95, candidates), 1u);
  EXPECT_EQ(rank_from_scores(0.0, candidates), 4u);
}

TEST(Mrr, DirectFormula) {
  const std::size_t perfect[] = {1};
  EXPECT_DOUBLE_EQ(mrr(perfect), 1.0);
  const std::size_t ranks[] = {1, 2, 4};
  EXPECT_NEAR(mrr(ranks), 7.0 / 12.0, 1e-12);
  const std::size_t worst[] = {14951, 14951};
  EXPECT_GT(mrr(worst), 0.0);
  EXPECT_THROW(mrr(std::span<const std::size_t>{}), Error);
  const std::size_t zero[] = {0};
  EXPECT_THROW(mrr(zero), Error);
}

TEST(Mrr, PermutationInvariant) {
  std::vector<std::size_t> ranks{3, 1, 7, 2, 2, 50, 9};
  const double base = mrr(ranks);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(ranks.begin(), ranks.end(), rng);
    EXPECT_DOUBLE_EQ(mrr(ranks), base);
  }
}

TEST(HitsAtK, StrictAndInclusive) {
  const std::size_t ranks[] = {1, 5, 15};
  EXPECT_NEAR(hits_at_k(ranks, 10, HitsComparator::kStrict), 2.0 / 3.0, 1e-15);
  const std::size_t boundary[] = {10};
  EXPECT_EQ(hits_at_k(boundary, 10, HitsComparator::kStrict), 0.0);
  EXPECT_EQ(hits_at_k(boundary, 10, HitsComparator::kInclusive), 1.0);
  EXPECT_EQ(hits_at_k(boundary, 10), 1.0);
  const std::size_t ones[] = {1, 1, 1};
  for (std::size_t k = 2; k < 6; ++k) EXPECT_EQ(hits_at_k(ones, k, HitsComparator::kStrict), 1.0);
  EXPECT_THROW(hits_at_k(ones, 0), Error);
}

TEST(HitsAtK, MonotoneInK) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(1, 40);
  std::vector<std::size_t> ranks(200);
  for (auto& x : ranks) x = pick(rng);
  for (auto cmp : {HitsComparator::kStrict, HitsComparator::kInclusive}) {
    double prev = 0.0;
    for (std::size_t k = 1; k <= 45; ++k) {
      const double h = hits_at_k(ranks, k, cmp);
      EXPECT_GE(h, prev);
      EXPECT_LE(h, 1.0);
      prev = h;
    }
  }
}

TEST(Comparator, Tokens) {
  EXPECT_EQ(parse_comparator("strict"), HitsComparator::kStrict);
  EXPECT_EQ(parse_comparator(comparator_name(HitsComparator::kInclusive)), HitsComparator::kInclusive);
  EXPECT_FALSE(parse_comparator("loose").has_value());
}

// DistMult with d=1 and r = 1, so score(e1, r1, e) = x_e1 * x_e.
ModelParams scalar_model(const TripleStore& store, std::vector<double> entity_values) {
  ModelParams p(Family::kDistMult, 1, store.num_entities(), store.num_relations());
  p.entities = std::move(entity_values);
  std::fill(p.relations.begin(), p.relations.end(), 1.0);
  return p;
}

TEST(RankTriple, FilteringRemovesOutrankingPositive) {
  auto store = build_indexes(testing::toy_entities(), testing::toy_relations(), {{e(1), r(1), e(2)}}, {},
                             {{e(1), r(1), e(3)}});
  auto p = scalar_model(store, {0.3, 1.0, 0.5, -1.0, -1.0});
  const Triple t{e(1), r(1), e(3)};
  EXPECT_EQ(rank_triple(p, store, t, kAllSplits, RankMode::kRaw).target_rank, 2u);
  EXPECT_EQ(rank_triple(p, store, t, kAllSplits, RankMode::kFiltered).target_rank, 1u);
  EXPECT_EQ(rank_triple(p, store, t, kTestSplit, RankMode::kFiltered).target_rank, 2u);
}

TEST(RankTriple, ConstantScoreModelRanksLast) {
  auto kg = generate_synthetic_kg();
  const auto& store = kg.store;
  ModelParams p(Family::kDistMult, 4, store.num_entities(), store.num_relations());
  std::fill(p.entities.begin(), p.entities.end(), 0.5);
  for (std::size_t i = 0; i < 20; ++i) {
    const Triple& t = store.test()[i];
    const auto raw = rank_triple(p, store, t, kAllSplits, RankMode::kRaw);
    EXPECT_EQ(raw.target_rank, store.num_entities());
    EXPECT_EQ(raw.source_rank, store.num_entities());
    const auto filtered = rank_triple(p, store, t, kAllSplits);
    const std::size_t known_targets = store.targets(t.source, t.relation, kAllSplits).size();
    const std::size_t known_sources = store.sources(t.relation, t.target, kAllSplits).size();
    EXPECT_EQ(filtered.target_rank, store.num_entities() - known_targets + 1);
    EXPECT_EQ(filtered.source_rank, store.num_entities() - known_sources + 1);
  }
}

TEST(RankTriple, FilteredNeverExceedsRaw) {
  auto kg = generate_synthetic_kg();
  for (Family f : testing::kAllFamilies) {
    auto p = init_params(f, 6, kg.store.num_entities(), kg.store.num_relations(), 8);
    for (const auto& t : kg.store.test()) {
      const auto raw = rank_triple(p, kg.store, t, kAllSplits, RankMode::kRaw);
      const auto filtered = rank_triple(p, kg.store, t, kAllSplits);
      EXPECT_LE(filtered.target_rank, raw.target_rank);
      EXPECT_LE(filtered.source_rank, raw.source_rank);
      EXPECT_GE(filtered.target_rank, 1u);
      EXPECT_LE(raw.target_rank, kg.store.num_entities());
    }
  }
}

TEST(Evaluate, PerfectModelScoresOne) {
  // RESCAL with permutation-like W: W_r1[e1][e2] = W_r1[e3][e4] = 1, W_r2[e1][e5] = 1.
  auto store = testing::three_triple_store();
  ModelParams p(Family::kRescal, 5, 5, 2);
  for (EntityId id = 0; id < 5; ++id) p.entity(id)[id] = 1.0;
  p.relation(r(1))[e(1) * 5 + e(2)] = 1.0;
  p.relation(r(1))[e(3) * 5 + e(4)] = 1.0;
  p.relation(r(2))[e(1) * 5 + e(5)] = 1.0;
  const auto stats = compute_stats(store);
  auto report = evaluate(p, store, Split::kTrain, stats);
  EXPECT_DOUBLE_EQ(report.mrr, 1.0);
  EXPECT_DOUBLE_EQ(report.hits.at(1), 1.0);
  EXPECT_EQ(report.n_evaluated, 3u);
}

TEST(Evaluate, SlicesMatchPartitionedRecompute) {
  // Relations with 1, 12 and 120 training triples, plus one seen only in test.
  Dictionary ents;
  for (int i = 0; i < 40; ++i) ents.intern("n" + std::to_string(i));
  auto rels = testing::toy_relations(4);
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<EntityId> pick(0, 39);
  std::vector<Triple> train, test;
  const std::size_t counts[] = {1, 12, 120};
  for (RelationId rel = 0; rel < 3; ++rel) {
    std::set<std::pair<EntityId, EntityId>> seen;
    while (seen.size() < counts[rel]) seen.insert({pick(rng), pick(rng)});
    for (auto [s, t] : seen) train.push_back({s, rel, t});
  }
  for (int i = 0; i < 40; ++i) test.push_back({pick(rng), static_cast<RelationId>(i % 4), pick(rng)});
  auto store = build_indexes(ents, rels, train, {}, test);
  const auto stats = compute_stats(store);
  auto p = init_params(Family::kComplEx, 4, store.num_entities(), store.num_relations(), 2);
  EvalOptions opts;
  opts.ks = {1, 10};
  auto report = evaluate(p, store, Split::kTest, stats, opts);

  std::map<int, std::vector<std::size_t>> partition;
  for (const auto& rr : report.rankings) {
    const int g = stats.group_of(rr.triple.relation).value_or(-1);
    partition[g].push_back(rr.target_rank);
    partition[g].push_back(rr.source_rank);
  }
  EXPECT_EQ(partition.size(), 4u);
  ASSERT_EQ(report.per_slice.size(), partition.size());
  double weighted = 0.0;
  std::size_t total = 0;
  for (const auto& [g, ranks] : partition) {
    const auto& slice = report.per_slice.at(g);
    double recip = 0.0;
    for (auto x : ranks) recip += 1.0 / static_cast<double>(x);
    EXPECT_NEAR(slice.mrr, recip / static_cast<double>(ranks.size()), 1e-12);
    std::size_t within = 0;
    for (auto x : ranks) within += x <= 10;
    EXPECT_NEAR(slice.hits.at(10), static_cast<double>(within) / static_cast<double>(ranks.size()), 1e-12);
    EXPECT_EQ(slice.n_ranks, ranks.size());
    weighted += slice.mrr * static_cast<double>(slice.n_ranks);
    total += slice.n_ranks;
  }
  EXPECT_NEAR(report.mrr, weighted / static_cast<double>(total), 1e-12);
}

TEST(Evaluate, ThreadCountDoesNotChangeResult) {
  auto kg = generate_synthetic_kg();
  auto p = init_params(Family::kTransE, 8, kg.store.num_entities(), kg.store.num_relations(), 3);
  const auto stats = compute_stats(kg.store);
  EvalOptions one, many;
  one.threads = 1;
  many.threads = 4;
  auto a = evaluate(p, kg.store, Split::kTest, stats, one);
  auto b = evaluate(p, kg.store, Split::kTest, stats, many);
  EXPECT_EQ(a.mrr, b.mrr);
  EXPECT_EQ(a.hits, b.hits);
}

TEST(Evaluate, EmptySplitIsAnError) {
  auto store = testing::three_triple_store();
  auto p = init_params(Family::kTransE, 4, 5, 2, 1);
  EXPECT_THROW(evaluate(p, store, Split::kTest, compute_stats(store)), Error);
}

}  // namespace
}  // namespace kgneg
