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
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kgneg/error.hpp"
#include "kgneg/random.hpp"
#include "kgneg/triple_store.hpp"
#include "kgneg/type_catalog.hpp"

namespace kgneg {

// A typed toy KG with learnable structure. Entity i of every type belongs to
// latent group i; each relation links entity i of its domain type to entity i
// of its range type, so every relation is 1:1 and strictly typed.
struct SyntheticConfig {
  std::size_t num_types = 4;
  std::size_t entities_per_type = 50;
  std::size_t num_relations = 10;
  std::size_t dev_size = 50;
  std::size_t test_size = 50;
  std::uint64_t seed = 7;
};

struct SyntheticKg {
  TripleStore store;
  TypeCatalog catalog;
};

inline SyntheticKg generate_synthetic_kg(const SyntheticConfig& cfg = {}) {
  const std::size_t max_relations = cfg.num_types * (cfg.num_types - 1);
  if (cfg.num_types < 2 || cfg.entities_per_type < 1) throw ConfigError("synthetic KG needs >= 2 types");
  if (cfg.num_relations < 1 || cfg.num_relations > max_relations) {
    throw ConfigError("synthetic KG supports 1.." + std::to_string(max_relations) + " relations");
  }
  Rng rng = make_rng(cfg.seed, Stream::kSynthetic);

  Dictionary entities;
  for (std::size_t k = 0; k < cfg.num_types; ++k) {
    for (std::size_t i = 0; i < cfg.entities_per_type; ++i) {
      entities.intern("type" + std::to_string(k) + "_e" + std::to_string(i));
    }
  }
  auto entity_of = [&](std::size_t type, std::size_t i) {
    return static_cast<EntityId>(type * cfg.entities_per_type + i);
  };

  std::vector<std::pair<std::size_t, std::size_t>> type_pairs;
  for (std::size_t a = 0; a < cfg.num_types; ++a) {
    for (std::size_t b = 0; b < cfg.num_types; ++b) {
      if (a != b) type_pairs.emplace_back(a, b);
    }
  }
  std::shuffle(type_pairs.begin(), type_pairs.end(), rng);
  type_pairs.resize(cfg.num_relations);

  Dictionary relations;
  std::vector<Triple> all;
  for (std::size_t j = 0; j < type_pairs.size(); ++j) {
    const auto [a, b] = type_pairs[j];
    const RelationId r =
        relations.intern("rel" + std::to_string(j) + "_type" + std::to_string(a) + "_to_type" + std::to_string(b));
    for (std::size_t i = 0; i < cfg.entities_per_type; ++i) all.push_back({entity_of(a, i), r, entity_of(b, i)});
  }
  if (cfg.dev_size + cfg.test_size >= all.size()) throw ConfigError("synthetic KG: dev+test exceed the triple count");
  std::shuffle(all.begin(), all.end(), rng);
  std::vector<Triple> dev(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(cfg.dev_size));
  std::vector<Triple> test(all.begin() + static_cast<std::ptrdiff_t>(cfg.dev_size),
                           all.begin() + static_cast<std::ptrdiff_t>(cfg.dev_size + cfg.test_size));
  std::vector<Triple> train(all.begin() + static_cast<std::ptrdiff_t>(cfg.dev_size + cfg.test_size), all.end());

  SyntheticKg kg{build_indexes(std::move(entities), std::move(relations), std::move(train), std::move(dev),
                               std::move(test)),
                 {}};
  kg.catalog = TypeCatalog(kg.store.num_entities(), kg.store.num_relations());
  for (std::size_t k = 0; k < cfg.num_types; ++k) {
    for (std::size_t i = 0; i < cfg.entities_per_type; ++i) kg.catalog.add_entity_type(entity_of(k, i), "type" + std::to_string(k));
  }
  for (std::size_t j = 0; j < type_pairs.size(); ++j) {
    kg.catalog.set_signature(static_cast<RelationId>(j), "type" + std::to_string(type_pairs[j].first),
                             "type" + std::to_string(type_pairs[j].second));
  }
  return kg;
}

}  // namespace kgneg
