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

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgneg/ball_tree.hpp"
#include "kgneg/error.hpp"
#include "kgneg/loss.hpp"
#include "kgneg/model.hpp"
#include "kgneg/random.hpp"
#include "kgneg/triple_store.hpp"
#include "kgneg/type_catalog.hpp"

namespace kgneg {

enum class SamplerKind : std::uint8_t { kRandom, kCorrupt, kTyped, kRelational, kNearestNeighbor, kNearMiss };

inline const char* sampler_name(SamplerKind k) {
  switch (k) {
    case SamplerKind::kRandom: return "random";
    case SamplerKind::kCorrupt: return "corrupt";
    case SamplerKind::kTyped: return "typed";
    case SamplerKind::kRelational: return "relational";
    case SamplerKind::kNearestNeighbor: return "nn";
    case SamplerKind::kNearMiss: return "nmiss";
  }
  return "?";
}

inline std::optional<SamplerKind> parse_sampler(std::string_view name) {
  for (auto k : {SamplerKind::kRandom, SamplerKind::kCorrupt, SamplerKind::kTyped, SamplerKind::kRelational,
                 SamplerKind::kNearestNeighbor, SamplerKind::kNearMiss}) {
    if (name == sampler_name(k)) return k;
  }
  return std::nullopt;
}

inline bool is_embedding_sampler(SamplerKind k) {
  return k == SamplerKind::kNearestNeighbor || k == SamplerKind::kNearMiss;
}

namespace detail {

inline EntityId uniform_entity(std::size_t num_entities, Rng& rng) {
  std::uniform_int_distribution<EntityId> pick(0, static_cast<EntityId>(num_entities - 1));
  return pick(rng);
}

// Up to n distinct pool members in random order (partial Fisher-Yates).
inline std::vector<EntityId> draw_without_replacement(std::vector<EntityId> pool, std::size_t n, Rng& rng) {
  const std::size_t take = std::min(n, pool.size());
  for (std::size_t i = 0; i < take; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(take);
  return pool;
}

// Sorted pool minus sorted exclusions.
inline std::vector<EntityId> subtract(const std::vector<EntityId>& pool, const std::vector<EntityId>& excluded) {
  std::vector<EntityId> out;
  std::set_difference(pool.begin(), pool.end(), excluded.begin(), excluded.end(), std::back_inserter(out));
  return out;
}

// Tops `out` up to n with uniformly drawn entities that fail `is_positive`.
// Draws are with replacement; if rejection keeps failing the complement is
// enumerated, and an empty complement leaves the batch short.
template <typename IsPositive>
void fill_random(std::vector<EntityId>& out, std::size_t n, std::size_t num_entities, Rng& rng,
                 IsPositive&& is_positive) {
  constexpr int kMaxAttempts = 64;
  while (out.size() < n) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      const EntityId e = uniform_entity(num_entities, rng);
      if (!is_positive(e)) {
        out.push_back(e);
        placed = true;
        break;
      }
    }
    if (placed) continue;
    std::vector<EntityId> complement;
    for (EntityId e = 0; e < num_entities; ++e) {
      if (!is_positive(e)) complement.push_back(e);
    }
    if (complement.empty()) return;
    std::uniform_int_distribution<std::size_t> pick(0, complement.size() - 1);
    while (out.size() < n) out.push_back(complement[pick(rng)]);
  }
}

template <typename IsPositive>
std::vector<EntityId> pool_then_fill(std::vector<EntityId> pool, std::size_t n, std::size_t num_entities, Rng& rng,
                                     IsPositive&& is_positive) {
  auto out = draw_without_replacement(std::move(pool), n, rng);
  fill_random(out, n, num_entities, rng, is_positive);
  return out;
}

inline std::vector<EntityId> unique_sorted(std::vector<EntityId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace detail

// Uniform draws over all entities, with replacement and without a
// positivity check.
inline NegativeBatch sample_random(const TripleStore& store, const Triple&, std::size_t n_s, Rng& rng) {
  if (store.num_entities() < 2) throw Error("random sampling needs at least two entities");
  NegativeBatch b;
  b.neg_targets.reserve(n_s);
  b.neg_sources.reserve(n_s);
  for (std::size_t i = 0; i < n_s; ++i) b.neg_targets.push_back(detail::uniform_entity(store.num_entities(), rng));
  for (std::size_t i = 0; i < n_s; ++i) b.neg_sources.push_back(detail::uniform_entity(store.num_entities(), rng));
  return b;
}

// Candidate pools shared by the pool-based samplers, before drawing.
struct CandidatePools {
  std::vector<EntityId> targets;
  std::vector<EntityId> sources;
};

inline CandidatePools corrupt_pools(const TripleStore& store, const Triple& t, SplitMask filter) {
  return {detail::subtract(store.relation_targets(t.relation, filter), store.targets(t.source, t.relation, filter)),
          detail::subtract(store.relation_sources(t.relation, filter), store.sources(t.relation, t.target, filter))};
}

// Entities whose type set contains the relation's range (targets) or domain
// (sources), minus known positives. nullopt when the relation has no signature.
inline std::optional<CandidatePools> typed_pools(const TripleStore& store, const TypeCatalog& catalog, const Triple& t,
                                                 SplitMask filter) {
  if (t.relation >= store.num_relations()) throw IndexError("relation id out of range");
  const auto sig = catalog.find_signature(t.relation);
  if (!sig) return std::nullopt;
  return CandidatePools{
      detail::subtract(catalog.entities_with_type(sig->range), store.targets(t.source, t.relation, filter)),
      detail::subtract(catalog.entities_with_type(sig->domain), store.sources(t.relation, t.target, filter))};
}

// Targets reachable from the source through other relations, and sources
// reaching the target through other relations, minus known positives.
inline CandidatePools relational_pools(const TripleStore& store, const Triple& t, SplitMask filter) {
  std::vector<EntityId> targets;
  for (const auto& [rel, e] : store.out_neighbors(t.source, filter)) {
    if (rel != t.relation) targets.push_back(e);
  }
  std::vector<EntityId> sources;
  for (const auto& [rel, e] : store.in_neighbors(t.target, filter)) {
    if (rel != t.relation) sources.push_back(e);
  }
  return {detail::subtract(detail::unique_sorted(std::move(targets)), store.targets(t.source, t.relation, filter)),
          detail::subtract(detail::unique_sorted(std::move(sources)), store.sources(t.relation, t.target, filter))};
}

// Draws from the pools without replacement, then tops up with filtered
// random entities.
inline NegativeBatch sample_from_pools(const TripleStore& store, const Triple& t, CandidatePools pools,
                                       std::size_t n_s, Rng& rng, SplitMask filter) {
  NegativeBatch b;
  b.neg_targets = detail::pool_then_fill(std::move(pools.targets), n_s, store.num_entities(), rng, [&](EntityId e) {
    return store.contains({t.source, t.relation, e}, filter);
  });
  b.neg_sources = detail::pool_then_fill(std::move(pools.sources), n_s, store.num_entities(), rng, [&](EntityId e) {
    return store.contains({e, t.relation, t.target}, filter);
  });
  return b;
}

inline NegativeBatch sample_corrupt(const TripleStore& store, const Triple& t, std::size_t n_s, Rng& rng,
                                    SplitMask filter = kTrainDev) {
  return sample_from_pools(store, t, corrupt_pools(store, t, filter), n_s, rng, filter);
}

// Falls back to corrupt sampling for relations without a signature.
inline NegativeBatch sample_typed(const TripleStore& store, const TypeCatalog& catalog, const Triple& t,
                                  std::size_t n_s, Rng& rng, SplitMask filter = kTrainDev) {
  auto pools = typed_pools(store, catalog, t, filter);
  if (!pools) return sample_corrupt(store, t, n_s, rng, filter);
  return sample_from_pools(store, t, std::move(*pools), n_s, rng, filter);
}

inline NegativeBatch sample_relational(const TripleStore& store, const Triple& t, std::size_t n_s, Rng& rng,
                                       SplitMask filter = kTrainDev) {
  return sample_from_pools(store, t, relational_pools(store, t, filter), n_s, rng, filter);
}

// A pre-trained model used only to propose negatives, with a ball tree over
// its entity rows built once at construction. Never modified.
class FrozenSamplerModel {
 public:
  explicit FrozenSamplerModel(ModelParams params, std::size_t leaf_size = 32)
      : params_(std::move(params)), index_(build_index(params_, leaf_size)) {}

  const ModelParams& params() const { return params_; }
  const KnnIndex& index() const { return index_; }

 private:
  static KnnIndex build_index(const ModelParams& p, std::size_t leaf_size) {
    std::vector<std::uint32_t> ids(p.num_entities);
    for (EntityId e = 0; e < p.num_entities; ++e) ids[e] = e;
    return KnnIndex(p.entities, std::move(ids), p.entity_width(), leaf_size);
  }

  const ModelParams params_;
  const KnnIndex index_;
};

namespace detail {

inline std::vector<EntityId> ids_of(const std::vector<KnnIndex::Neighbor>& hits) {
  std::vector<EntityId> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(h.id);
  return out;
}

inline void check_frozen(const TripleStore& store, const FrozenSamplerModel& frozen) {
  if (frozen.params().num_entities != store.num_entities() || frozen.params().num_relations != store.num_relations()) {
    throw Error("frozen sampler model does not match the store's dictionaries");
  }
}

}  // namespace detail

// Nearest non-positive neighbours of the frozen embeddings of t (targets)
// and s (sources). Positives are filtered from the tree's results; the query
// entity itself is never returned.
inline NegativeBatch sample_nearest_neighbor(const TripleStore& store, const FrozenSamplerModel& frozen,
                                             const Triple& t, std::size_t n_s, SplitMask filter = kTrainDev) {
  detail::check_frozen(store, frozen);
  const auto& p = frozen.params();
  NegativeBatch b;
  b.neg_targets = detail::ids_of(frozen.index().query(p.entity(t.target), n_s, [&](EntityId e) {
    return e != t.target && !store.contains({t.source, t.relation, e}, filter);
  }));
  b.neg_sources = detail::ids_of(frozen.index().query(p.entity(t.source), n_s, [&](EntityId e) {
    return e != t.source && !store.contains({e, t.relation, t.target}, filter);
  }));
  return b;
}

// Nearest non-positive neighbours of the frozen model's predicted target
// and source vectors.
inline NegativeBatch sample_near_miss(const TripleStore& store, const FrozenSamplerModel& frozen, const Triple& t,
                                      std::size_t n_s, SplitMask filter = kTrainDev) {
  detail::check_frozen(store, frozen);
  const auto v = predicted_vectors(frozen.params(), t.source, t.relation, t.target);
  NegativeBatch b;
  b.neg_targets = detail::ids_of(frozen.index().query(v.target, n_s, [&](EntityId e) {
    return e != t.target && !store.contains({t.source, t.relation, e}, filter);
  }));
  b.neg_sources = detail::ids_of(frozen.index().query(v.source, n_s, [&](EntityId e) {
    return e != t.source && !store.contains({e, t.relation, t.target}, filter);
  }));
  return b;
}

// Common interface used by the trainer. Implementations hold references to
// the store (and catalog), which must outlive them.
class NegativeSampler {
 public:
  virtual ~NegativeSampler() = default;
  virtual NegativeBatch sample(const Triple& positive, std::size_t n_s, Rng& rng) const = 0;
  virtual SamplerKind kind() const = 0;
};

class RandomSampler final : public NegativeSampler {
 public:
  explicit RandomSampler(const TripleStore& store) : store_(store) {}
  NegativeBatch sample(const Triple& t, std::size_t n_s, Rng& rng) const override {
    return sample_random(store_, t, n_s, rng);
  }
  SamplerKind kind() const override { return SamplerKind::kRandom; }

 private:
  const TripleStore& store_;
};

class CorruptSampler final : public NegativeSampler {
 public:
  explicit CorruptSampler(const TripleStore& store, SplitMask filter = kTrainDev) : store_(store), filter_(filter) {}
  NegativeBatch sample(const Triple& t, std::size_t n_s, Rng& rng) const override {
    return sample_corrupt(store_, t, n_s, rng, filter_);
  }
  SamplerKind kind() const override { return SamplerKind::kCorrupt; }

 private:
  const TripleStore& store_;
  SplitMask filter_;
};

class TypedSampler final : public NegativeSampler {
 public:
  TypedSampler(const TripleStore& store, const TypeCatalog& catalog, SplitMask filter = kTrainDev)
      : store_(store), catalog_(catalog), filter_(filter) {}
  NegativeBatch sample(const Triple& t, std::size_t n_s, Rng& rng) const override {
    return sample_typed(store_, catalog_, t, n_s, rng, filter_);
  }
  SamplerKind kind() const override { return SamplerKind::kTyped; }

 private:
  const TripleStore& store_;
  const TypeCatalog& catalog_;
  SplitMask filter_;
};

class RelationalSampler final : public NegativeSampler {
 public:
  explicit RelationalSampler(const TripleStore& store, SplitMask filter = kTrainDev)
      : store_(store), filter_(filter) {}
  NegativeBatch sample(const Triple& t, std::size_t n_s, Rng& rng) const override {
    return sample_relational(store_, t, n_s, rng, filter_);
  }
  SamplerKind kind() const override { return SamplerKind::kRelational; }

 private:
  const TripleStore& store_;
  SplitMask filter_;
};

class NearestNeighborSampler final : public NegativeSampler {
 public:
  NearestNeighborSampler(const TripleStore& store, std::shared_ptr<const FrozenSamplerModel> frozen,
                         SplitMask filter = kTrainDev)
      : store_(store), frozen_(std::move(frozen)), filter_(filter) {
    if (!frozen_) throw Error("nearest-neighbour sampling needs a frozen sampler model");
    detail::check_frozen(store_, *frozen_);
  }
  NegativeBatch sample(const Triple& t, std::size_t n_s, Rng&) const override {
    return sample_nearest_neighbor(store_, *frozen_, t, n_s, filter_);
  }
  SamplerKind kind() const override { return SamplerKind::kNearestNeighbor; }
  const FrozenSamplerModel& frozen() const { return *frozen_; }

 private:
  const TripleStore& store_;
  std::shared_ptr<const FrozenSamplerModel> frozen_;
  SplitMask filter_;
};

class NearMissSampler final : public NegativeSampler {
 public:
  NearMissSampler(const TripleStore& store, std::shared_ptr<const FrozenSamplerModel> frozen,
                  SplitMask filter = kTrainDev)
      : store_(store), frozen_(std::move(frozen)), filter_(filter) {
    if (!frozen_) throw Error("near-miss sampling needs a frozen sampler model");
    detail::check_frozen(store_, *frozen_);
  }
  NegativeBatch sample(const Triple& t, std::size_t n_s, Rng&) const override {
    return sample_near_miss(store_, *frozen_, t, n_s, filter_);
  }
  SamplerKind kind() const override { return SamplerKind::kNearMiss; }
  const FrozenSamplerModel& frozen() const { return *frozen_; }

 private:
  const TripleStore& store_;
  std::shared_ptr<const FrozenSamplerModel> frozen_;
  SplitMask filter_;
};

inline std::unique_ptr<NegativeSampler> make_sampler(SamplerKind kind, const TripleStore& store,
                                                     const TypeCatalog* catalog,
                                                     std::shared_ptr<const FrozenSamplerModel> frozen,
                                                     SplitMask filter = kTrainDev) {
  switch (kind) {
    case SamplerKind::kRandom: return std::make_unique<RandomSampler>(store);
    case SamplerKind::kCorrupt: return std::make_unique<CorruptSampler>(store, filter);
    case SamplerKind::kTyped:
      if (!catalog) throw ConfigError("typed sampling needs a type catalog");
      return std::make_unique<TypedSampler>(store, *catalog, filter);
    case SamplerKind::kRelational: return std::make_unique<RelationalSampler>(store, filter);
    case SamplerKind::kNearestNeighbor:
      return std::make_unique<NearestNeighborSampler>(store, std::move(frozen), filter);
    case SamplerKind::kNearMiss: return std::make_unique<NearMissSampler>(store, std::move(frozen), filter);
  }
  throw Error("unknown sampler kind");
}

}  // namespace kgneg
