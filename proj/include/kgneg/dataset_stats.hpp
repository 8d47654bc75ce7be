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
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <vector>

#include "kgneg/error.hpp"
#include "kgneg/triple_store.hpp"

namespace kgneg {

// Order-of-magnitude group n with 10^n < freq <= 10^(n+1); freq == 1 lands in 0.
inline int oom_group(std::size_t freq) {
  if (freq == 0) throw Error("oom_group: frequency must be positive");
  int n = 0;
  std::size_t upper = 10;
  while (freq > upper) {
    upper *= 10;
    ++n;
  }
  return n;
}

inline std::string slice_label(int group) { return group < 0 ? "unseen" : "G" + std::to_string(group); }

// Training-split statistics.
struct DatasetStats {
  std::vector<std::size_t> relation_freq;
  std::vector<std::size_t> degree;
  std::vector<int> relation_group;  // -1 for relations absent from train
  std::map<int, std::vector<RelationId>> oom_groups;
  std::size_t train_size = 0;

  std::optional<int> group_of(RelationId r) const {
    if (r >= relation_group.size() || relation_group[r] < 0) return std::nullopt;
    return relation_group[r];
  }

  // Training triples per entity, the convention behind published KG degree figures.
  double average_degree() const {
    return degree.empty() ? 0.0 : static_cast<double>(train_size) / static_cast<double>(degree.size());
  }
};

inline DatasetStats compute_stats(const TripleStore& store) {
  if (store.train().empty()) throw Error("compute_stats: training split is empty");
  DatasetStats stats;
  stats.relation_freq.assign(store.num_relations(), 0);
  stats.degree.assign(store.num_entities(), 0);
  stats.relation_group.assign(store.num_relations(), -1);
  stats.train_size = store.train().size();
  for (const auto& t : store.train()) {
    ++stats.relation_freq[t.relation];
    ++stats.degree[t.source];
    if (t.target != t.source) ++stats.degree[t.target];
  }
  for (RelationId r = 0; r < store.num_relations(); ++r) {
    if (stats.relation_freq[r] == 0) continue;
    const int g = oom_group(stats.relation_freq[r]);
    stats.relation_group[r] = g;
    stats.oom_groups[g].push_back(r);
  }
  return stats;
}

// Writes relation_stats.csv (relation,freq,oom) and entity_degree.csv (entity,degree).
inline void export_stats(const std::filesystem::path& dir, const DatasetStats& stats, const TripleStore& store) {
  std::filesystem::create_directories(dir);
  std::ofstream rel(dir / "relation_stats.csv");
  std::ofstream ent(dir / "entity_degree.csv");
  if (!rel || !ent) throw IoError("cannot write stats under " + dir.string());
  rel << "relation,freq,oom\n";
  for (RelationId r = 0; r < store.num_relations(); ++r) {
    rel << store.relations().name(r) << ',' << stats.relation_freq[r] << ',';
    if (stats.relation_group[r] >= 0) rel << stats.relation_group[r];
    rel << '\n';
  }
  ent << "entity,degree\n";
  for (EntityId e = 0; e < store.num_entities(); ++e) {
    ent << store.entities().name(e) << ',' << stats.degree[e] << '\n';
  }
}

}  // namespace kgneg
