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
#include <memory>
#include <set>

#include "knn_oracle.hpp"
#include "test_util.hpp"

namespace kgneg {
namespace {

using testing::e;
using testing::r;

std::set<EntityId> as_set(const std::vector<EntityId>& v) { return {v.begin(), v.end()}; }

const Triple kPositive{e(1), r(1), e(2)};

TEST(SampleRandom, DrawsRequestedCountFromAllEntities) {
  auto store = testing::three_triple_store();
  Rng rng(1);
  auto b = sample_random(store, kPositive, 100, rng);
  EXPECT_EQ(b.neg_targets.size(), 100u);
  EXPECT_EQ(b.neg_sources.size(), 100u);
  for (EntityId id : b.neg_targets) EXPECT_LT(id, store.num_entities());
}

TEST(SampleRandom, TwoEntityStoreAllowsEitherId) {
  Dictionary ents = testing::toy_entities(2);
  auto store = build_indexes(ents, testing::toy_relations(1), {{e(1), r(1), e(2)}});
  Rng rng(9);
  std::set<EntityId> seen;
  for (int i = 0; i < 50; ++i) {
    auto b = sample_random(store, {e(1), r(1), e(2)}, 1, rng);
    ASSERT_EQ(b.neg_targets.size(), 1u);
    seen.insert(b.neg_targets[0]);
  }
  EXPECT_EQ(seen, (std::set<EntityId>{e(1), e(2)}));
}

TEST(SampleRandom, SingleEntityStoreIsRejected) {
  auto store = build_indexes(testing::toy_entities(1), testing::toy_relations(1), {{e(1), r(1), e(1)}});
  Rng rng(1);
  EXPECT_THROW(sample_random(store, {e(1), r(1), e(1)}, 1, rng), Error);
}

TEST(SampleRandom, ResetRngReproducesBatch) {
  auto store = testing::three_triple_store();
  Rng a(42), b(42);
  auto x = sample_random(store, kPositive, 10, a);
  auto y = sample_random(store, kPositive, 10, b);
  EXPECT_EQ(x.neg_targets, y.neg_targets);
  EXPECT_EQ(x.neg_sources, y.neg_sources);
}

TEST(SampleCorrupt, DrawsFromObservedRoleMinusPositives) {
  auto store = testing::three_triple_store();
  Rng rng(3);
  auto b = sample_corrupt(store, kPositive, 1, rng);
  EXPECT_EQ(b.neg_targets, (std::vector<EntityId>{e(4)}));
  EXPECT_EQ(b.neg_sources, (std::vector<EntityId>{e(3)}));
}

TEST(SampleCorrupt, EmptyPoolFallsBackToFilteredRandom) {
  auto store = testing::three_triple_store();
  const Triple single{e(1), r(2), e(5)};
  EXPECT_TRUE(corrupt_pools(store, single, kTrainDev).targets.empty());
  Rng rng(4);
  auto b = sample_corrupt(store, single, 4, rng);
  ASSERT_EQ(b.neg_targets.size(), 4u);
  ASSERT_EQ(b.neg_sources.size(), 4u);
  for (EntityId id : b.neg_targets) EXPECT_NE(id, e(5));
  for (EntityId id : b.neg_sources) EXPECT_NE(id, e(1));
}

TEST(SampleCorrupt, PoolExhaustedThenRandomFill) {
  auto store = testing::three_triple_store();
  Rng rng(5);
  auto b = sample_corrupt(store, kPositive, 3, rng);
  ASSERT_EQ(b.neg_targets.size(), 3u);
  EXPECT_EQ(b.neg_targets[0], e(4));
  for (EntityId id : b.neg_targets) EXPECT_FALSE(store.contains({e(1), r(1), id}, kTrainDev));
}

TEST(SampleCorrupt, ShortBatchWhenEveryEntityIsPositive) {
  Dictionary ents = testing::toy_entities(2);
  auto store = build_indexes(ents, testing::toy_relations(1), {{e(1), r(1), e(1)}, {e(1), r(1), e(2)}});
  Rng rng(6);
  auto b = sample_corrupt(store, {e(1), r(1), e(2)}, 3, rng);
  EXPECT_TRUE(b.neg_targets.empty());
  EXPECT_LE(b.neg_sources.size(), 3u);
}

TEST(SampleTyped, PoolIsRangeTypeMinusPositives) {
  auto store = testing::five_triple_store();
  auto catalog = testing::toy_catalog(store);
  auto pools = typed_pools(store, catalog, kPositive, kTrainDev);
  ASSERT_TRUE(pools.has_value());
  EXPECT_EQ(pools->targets, (std::vector<EntityId>{e(4)}));
  EXPECT_EQ(pools->sources, (std::vector<EntityId>{e(3)}));
  Rng rng(7);
  EXPECT_EQ(sample_typed(store, catalog, kPositive, 1, rng).neg_targets, (std::vector<EntityId>{e(4)}));
}

TEST(SampleTyped, AnyMatchingTypeQualifies) {
  auto store = testing::five_triple_store();
  auto catalog = testing::toy_catalog(store);
  catalog.add_entity_type(e(5), "B");
  auto pools = typed_pools(store, catalog, kPositive, kTrainDev);
  ASSERT_TRUE(pools.has_value());
  EXPECT_EQ(pools->targets, (std::vector<EntityId>{e(4), e(5)}));
}

TEST(SampleTyped, UnsignedRelationBehavesAsCorrupt) {
  auto store = testing::five_triple_store();
  auto catalog = testing::toy_catalog(store);
  const Triple t{e(2), r(2), e(3)};
  Rng a(11), b(11);
  auto typed = sample_typed(store, catalog, t, 3, a);
  auto corrupt = sample_corrupt(store, t, 3, b);
  EXPECT_EQ(typed.neg_targets, corrupt.neg_targets);
  EXPECT_EQ(typed.neg_sources, corrupt.neg_sources);
}

TEST(SampleTyped, FactoryNeedsCatalog) {
  auto store = testing::five_triple_store();
  EXPECT_THROW(make_sampler(SamplerKind::kTyped, store, nullptr, nullptr), ConfigError);
}

TEST(SampleRelational, TargetsReachedThroughOtherRelations) {
  auto store = testing::three_triple_store();
  auto pools = relational_pools(store, kPositive, kTrainDev);
  EXPECT_EQ(pools.targets, (std::vector<EntityId>{e(5)}));
  EXPECT_TRUE(pools.sources.empty());
  Rng rng(8);
  auto b = sample_relational(store, kPositive, 1, rng);
  EXPECT_EQ(b.neg_targets, (std::vector<EntityId>{e(5)}));
  ASSERT_EQ(b.neg_sources.size(), 1u);
  EXPECT_NE(b.neg_sources[0], e(1));
}

TEST(SampleRelational, OtherRelationNeighbourThatIsPositiveIsExcluded) {
  auto store = build_indexes(testing::toy_entities(), testing::toy_relations(),
                             {{e(1), r(1), e(2)}, {e(1), r(2), e(2)}, {e(1), r(2), e(5)}, {e(1), r(1), e(3)}});
  auto pools = relational_pools(store, {e(1), r(1), e(3)}, kTrainDev);
  EXPECT_EQ(pools.targets, (std::vector<EntityId>{e(5)}));
}

TEST(SampleRelational, FilterSplitControlsPositives) {
  auto store = build_indexes(testing::toy_entities(), testing::toy_relations(),
                             {{e(1), r(1), e(2)}, {e(1), r(2), e(5)}}, {{e(1), r(1), e(5)}});
  EXPECT_TRUE(relational_pools(store, kPositive, kTrainDev).targets.empty());
  EXPECT_EQ(relational_pools(store, kPositive, kTrainSplit).targets, (std::vector<EntityId>{e(5)}));
}

// Frozen TransE table on d=2; positives of (e1, r1, .) are {e2}.
ModelParams nn_table() {
  ModelParams p(Family::kTransE, 2, 5, 2);
  const double rows[5][2] = {{-1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.9, 0.2}, {-0.6, -0.8}};
  for (EntityId id = 0; id < 5; ++id) {
    p.entity(id)[0] = rows[id][0];
    p.entity(id)[1] = rows[id][1];
  }
  return p;
}

std::vector<std::uint32_t> all_ids(std::size_t n) {
  std::vector<std::uint32_t> ids(n);
  for (std::uint32_t i = 0; i < n; ++i) ids[i] = i;
  return ids;
}

TEST(SampleNearestNeighbor, ClosestNonPositiveRow) {
  auto store = testing::three_triple_store();
  FrozenSamplerModel frozen(nn_table());
  auto b = sample_nearest_neighbor(store, frozen, kPositive, 1);
  EXPECT_EQ(b.neg_targets, (std::vector<EntityId>{e(4)}));
  EXPECT_EQ(b.neg_sources, (std::vector<EntityId>{e(5)}));
}

TEST(SampleNearestNeighbor, LargeRequestReturnsEveryNonPositive) {
  auto store = testing::three_triple_store();
  FrozenSamplerModel frozen(nn_table());
  auto b = sample_nearest_neighbor(store, frozen, kPositive, 10);
  EXPECT_EQ(as_set(b.neg_targets), (std::set<EntityId>{e(1), e(3), e(4), e(5)}));
  EXPECT_EQ(as_set(b.neg_sources), (std::set<EntityId>{e(2), e(3), e(4), e(5)}));
}

TEST(SampleNearMiss, IdentityRescalCollapsesOntoSourceNeighbours) {
  auto store = testing::three_triple_store();
  ModelParams p(Family::kRescal, 2, 5, 2);
  p.entities = nn_table().entities;
  for (RelationId rel = 0; rel < 2; ++rel) {
    auto w = p.relation(rel);
    w[0] = 1.0;
    w[1] = 0.0;
    w[2] = 0.0;
    w[3] = 1.0;
  }
  FrozenSamplerModel frozen(p);
  auto accept = [&](std::uint32_t id) { return id != kPositive.target && !store.contains({e(1), r(1), id}, kTrainDev); };
  auto expected =
      testing::brute_force_knn(p.entities, all_ids(5), 2, p.entity(kPositive.source), 3, accept);
  EXPECT_EQ(sample_near_miss(store, frozen, kPositive, 3).neg_targets, expected);
}

TEST(SampleNearMiss, RanksByDistanceToPredictedVector) {
  auto store = testing::three_triple_store();
  ModelParams p = nn_table();
  // TransE: v_t = x_e1 + x_r1 = (0.9, 0.25), nearest non-positive is e4.
  p.relation(r(1))[0] = 1.9;
  p.relation(r(1))[1] = 0.25;
  FrozenSamplerModel frozen(p);
  EXPECT_EQ(sample_near_miss(store, frozen, kPositive, 1).neg_targets, (std::vector<EntityId>{e(4)}));
}

TEST(SampleEmbedding, MatchesBruteForceOnRandomFrozenModels) {
  auto kg = generate_synthetic_kg();
  const auto& store = kg.store;
  for (Family f : testing::kAllFamilies) {
    auto p = init_params(f, 6, store.num_entities(), store.num_relations(), 17);
    FrozenSamplerModel frozen(p);
    const auto ids = all_ids(store.num_entities());
    for (std::size_t i = 0; i < 30; ++i) {
      const Triple& t = store.train()[i * 7 % store.train().size()];
      auto accept_t = [&](std::uint32_t id) {
        return id != t.target && !store.contains({t.source, t.relation, id}, kTrainDev);
      };
      auto accept_s = [&](std::uint32_t id) {
        return id != t.source && !store.contains({id, t.relation, t.target}, kTrainDev);
      };
      const std::size_t w = p.entity_width();
      auto nn = sample_nearest_neighbor(store, frozen, t, 5);
      EXPECT_EQ(nn.neg_targets, testing::brute_force_knn(p.entities, ids, w, p.entity(t.target), 5, accept_t));
      EXPECT_EQ(nn.neg_sources, testing::brute_force_knn(p.entities, ids, w, p.entity(t.source), 5, accept_s));
      auto v = predicted_vectors(p, t.source, t.relation, t.target);
      auto nm = sample_near_miss(store, frozen, t, 5);
      EXPECT_EQ(nm.neg_targets, testing::brute_force_knn(p.entities, ids, w, v.target, 5, accept_t));
      EXPECT_EQ(nm.neg_sources, testing::brute_force_knn(p.entities, ids, w, v.source, 5, accept_s));
    }
  }
}

TEST(SampleEmbedding, MismatchedFrozenModelIsRejected) {
  auto store = testing::three_triple_store();
  auto frozen = std::make_shared<const FrozenSamplerModel>(init_params(Family::kRescal, 2, 4, 2, 1));
  EXPECT_THROW(NearMissSampler(store, frozen), Error);
  EXPECT_THROW(NearestNeighborSampler(store, nullptr), Error);
}

class SamplerProperties : public ::testing::TestWithParam<SamplerKind> {};

TEST_P(SamplerProperties, NeverEmitsKnownPositiveAndRespectsBatchSize) {
  auto kg = generate_synthetic_kg();
  const auto& store = kg.store;
  auto frozen = std::make_shared<const FrozenSamplerModel>(
      init_params(Family::kRescal, 8, store.num_entities(), store.num_relations(), 3));
  auto sampler = make_sampler(GetParam(), store, &kg.catalog, frozen);
  Rng rng(12);
  for (std::size_t i = 0; i < 2000; ++i) {
    const Triple& t = store.train()[i % store.train().size()];
    const std::size_t n_s = 1 + i % 7;
    auto b = sampler->sample(t, n_s, rng);
    EXPECT_LE(b.neg_targets.size(), n_s);
    EXPECT_LE(b.neg_sources.size(), n_s);
    for (EntityId id : b.neg_targets) ASSERT_FALSE(store.contains({t.source, t.relation, id}, kTrainDev));
    for (EntityId id : b.neg_sources) ASSERT_FALSE(store.contains({id, t.relation, t.target}, kTrainDev));
  }
}

TEST_P(SamplerProperties, SameRngStateGivesSameBatch) {
  auto kg = generate_synthetic_kg();
  auto frozen = std::make_shared<const FrozenSamplerModel>(
      init_params(Family::kDistMult, 8, kg.store.num_entities(), kg.store.num_relations(), 3));
  auto sampler = make_sampler(GetParam(), kg.store, &kg.catalog, frozen);
  Rng a(77), b(77);
  for (std::size_t i = 0; i < 50; ++i) {
    const Triple& t = kg.store.train()[i];
    auto x = sampler->sample(t, 5, a);
    auto y = sampler->sample(t, 5, b);
    EXPECT_EQ(x.neg_targets, y.neg_targets);
    EXPECT_EQ(x.neg_sources, y.neg_sources);
  }
}

INSTANTIATE_TEST_SUITE_P(AllSamplers, SamplerProperties,
                         ::testing::Values(SamplerKind::kCorrupt, SamplerKind::kTyped, SamplerKind::kRelational,
                                           SamplerKind::kNearestNeighbor, SamplerKind::kNearMiss),
                         [](const auto& info) { return std::string(sampler_name(info.param)); });

// Pool members come first; once the pool is drawn dry the rest is fill.
void expect_pool_prefix(const std::vector<EntityId>& emitted, const std::vector<EntityId>& pool, std::size_t n_s) {
  const std::size_t from_pool = std::min(pool.size(), n_s);
  ASSERT_GE(emitted.size(), from_pool);
  std::set<EntityId> prefix(emitted.begin(), emitted.begin() + static_cast<std::ptrdiff_t>(from_pool));
  EXPECT_EQ(prefix.size(), from_pool);
  for (EntityId id : prefix) EXPECT_TRUE(std::binary_search(pool.begin(), pool.end(), id));
}

TEST(PoolSamplers, EmittedIdsComeFromBruteForcePool) {
  auto kg = generate_synthetic_kg();
  const auto& store = kg.store;
  Rng rng(21);
  for (std::size_t i = 0; i < 200; ++i) {
    const Triple& t = store.train()[i % store.train().size()];
    // Brute-force corrupt pool: every observed r-target not positive with (s, r).
    std::vector<EntityId> pool;
    for (EntityId c = 0; c < store.num_entities(); ++c) {
      bool observed = false;
      for (const auto& x : store.train()) observed |= (x.relation == t.relation && x.target == c);
      for (const auto& x : store.dev()) observed |= (x.relation == t.relation && x.target == c);
      if (observed && !store.contains({t.source, t.relation, c}, kTrainDev)) pool.push_back(c);
    }
    expect_pool_prefix(sample_corrupt(store, t, 3, rng).neg_targets, pool, 3);
    auto typed = typed_pools(store, kg.catalog, t, kTrainDev);
    ASSERT_TRUE(typed.has_value());
    expect_pool_prefix(sample_typed(store, kg.catalog, t, 60, rng).neg_targets, typed->targets, 60);
    expect_pool_prefix(sample_relational(store, t, 2, rng).neg_targets, relational_pools(store, t, kTrainDev).targets,
                       2);
  }
}

TEST(SamplerTokens, RoundTrip) {
  for (auto k : {SamplerKind::kRandom, SamplerKind::kCorrupt, SamplerKind::kTyped, SamplerKind::kRelational,
                 SamplerKind::kNearestNeighbor, SamplerKind::kNearMiss}) {
    EXPECT_EQ(parse_sampler(sampler_name(k)), k);
  }
  EXPECT_FALSE(parse_sampler("bogus").has_value());
  EXPECT_TRUE(is_embedding_sampler(SamplerKind::kNearMiss));
  EXPECT_FALSE(is_embedding_sampler(SamplerKind::kTyped));
}

}  // namespace
}  // namespace kgneg
