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
#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgneg/error.hpp"

namespace kgneg {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

struct Triple {
  EntityId source = 0;
  RelationId relation = 0;
  EntityId target = 0;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::uint64_t h = (static_cast<std::uint64_t>(t.source) << 32) ^ t.target;
    h ^= static_cast<std::uint64_t>(t.relation) * 0x9e3779b97f4a7c15ULL;
    h ^= h >> 29;
    h *= 0xbf58476d1ce4e5b9ULL;
    return static_cast<std::size_t>(h ^ (h >> 32));
  }
};

enum class Split : std::uint8_t { kTrain = 0, kDev = 1, kTest = 2 };

// Bit set over splits; queries take the union of the selected splits.
using SplitMask = std::uint8_t;
inline constexpr SplitMask kTrainSplit = 1;
inline constexpr SplitMask kDevSplit = 2;
inline constexpr SplitMask kTestSplit = 4;
inline constexpr SplitMask kTrainDev = kTrainSplit | kDevSplit;
inline constexpr SplitMask kAllSplits = kTrainSplit | kDevSplit | kTestSplit;

constexpr SplitMask mask_of(Split s) { return static_cast<SplitMask>(1u << static_cast<unsigned>(s)); }

inline const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "?";
}

inline std::optional<Split> parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev" || name == "valid") return Split::kDev;
  if (name == "test") return Split::kTest;
  return std::nullopt;
}

// Bijective string <-> dense id map. Ids are assigned in first-seen order.
class Dictionary {
 public:
  std::optional<std::uint32_t> find(std::string_view name) const {
    auto it = ids_.find(std::string(name));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  std::uint32_t intern(std::string_view name) {
    auto [it, inserted] = ids_.try_emplace(std::string(name), static_cast<std::uint32_t>(names_.size()));
    if (inserted) names_.emplace_back(name);
    return it->second;
  }

  const std::string& name(std::uint32_t id) const {
    if (id >= names_.size()) throw IndexError("dictionary id " + std::to_string(id) + " out of range");
    return names_[id];
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace detail

// Parses `source<TAB>relation<TAB>target` lines. Blank lines are skipped.
inline std::vector<Triple> parse_triples(std::istream& in, const std::string& source_name, Dictionary& entities,
                                         Dictionary& relations, bool grow) {
  std::vector<Triple> triples;
  std::string raw;
  std::size_t line_no = 0;
  auto lookup = [&](Dictionary& dict, std::string_view sym, const char* kind) -> std::uint32_t {
    if (grow) return dict.intern(sym);
    auto id = dict.find(sym);
    if (!id) {
      throw VocabularyError(source_name + ":" + std::to_string(line_no) + ": unknown " + kind + " '" +
                            std::string(sym) + "'");
    }
    return *id;
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = detail::chomp(raw);
    if (line.empty()) continue;
    auto cols = detail::split_tabs(line);
    if (cols.size() != 3) {
      throw ParseError(source_name, line_no, "expected 3 tab-separated columns, found " + std::to_string(cols.size()));
    }
    for (auto c : cols) {
      if (c.empty()) throw ParseError(source_name, line_no, "empty column");
    }
    Triple t;
    t.source = lookup(entities, cols[0], "entity");
    t.relation = lookup(relations, cols[1], "relation");
    t.target = lookup(entities, cols[2], "entity");
    triples.push_back(t);
  }
  return triples;
}

inline std::vector<Triple> load_split(const std::filesystem::path& path, Dictionary& entities, Dictionary& relations,
                                      bool grow) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open triple file " + path.string());
  return parse_triples(in, path.string(), entities, relations, grow);
}

inline void write_triples(std::ostream& out, const std::vector<Triple>& triples, const Dictionary& entities,
                          const Dictionary& relations) {
  for (const auto& t : triples) {
    out << entities.name(t.source) << '\t' << relations.name(t.relation) << '\t' << entities.name(t.target) << '\n';
  }
}

inline void write_split(const std::filesystem::path& path, const std::vector<Triple>& triples,
                        const Dictionary& entities, const Dictionary& relations) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write triple file " + path.string());
  write_triples(out, triples, entities, relations);
  if (!out) throw IoError("write failed for " + path.string());
}

// Immutable triple container with membership and adjacency indexes. Every
// index entry remembers which splits it came from, so one store answers
// queries over any split union.
class TripleStore {
 public:
  struct Tagged {
    EntityId id;
    SplitMask splits;
  };
  struct Neighbor {
    RelationId relation;
    EntityId entity;
    SplitMask splits;
  };

  TripleStore() = default;

  TripleStore(Dictionary entities, Dictionary relations, std::array<std::vector<Triple>, 3> splits)
      : entities_(std::move(entities)), relations_(std::move(relations)), splits_(std::move(splits)) {
    build();
  }

  std::size_t num_entities() const { return entities_.size(); }
  std::size_t num_relations() const { return relations_.size(); }
  const Dictionary& entities() const { return entities_; }
  const Dictionary& relations() const { return relations_; }

  const std::vector<Triple>& split(Split s) const { return splits_[static_cast<std::size_t>(s)]; }
  const std::vector<Triple>& train() const { return split(Split::kTrain); }
  const std::vector<Triple>& dev() const { return split(Split::kDev); }
  const std::vector<Triple>& test() const { return split(Split::kTest); }

  bool contains(const Triple& t, SplitMask mask) const {
    auto it = membership_.find(t);
    return it != membership_.end() && (it->second & mask) != 0;
  }

  // Known targets t with (s, r, t) in the selected splits, ascending.
  std::vector<EntityId> targets(EntityId s, RelationId r, SplitMask mask) const {
    return select(sr_targets_, detail::pair_key(s, r), mask);
  }
  // Known sources s with (s, r, t) in the selected splits, ascending.
  std::vector<EntityId> sources(RelationId r, EntityId t, SplitMask mask) const {
    return select(rt_sources_, detail::pair_key(r, t), mask);
  }
  // Every entity observed as a target (source) of relation r.
  std::vector<EntityId> relation_targets(RelationId r, SplitMask mask) const {
    check_relation(r);
    return select(relation_targets_[r], mask);
  }
  std::vector<EntityId> relation_sources(RelationId r, SplitMask mask) const {
    check_relation(r);
    return select(relation_sources_[r], mask);
  }

  // (relation, target) pairs for triples leaving e, sorted.
  std::vector<std::pair<RelationId, EntityId>> out_neighbors(EntityId e, SplitMask mask) const {
    check_entity(e);
    return select(out_[e], mask);
  }
  // (relation, source) pairs for triples entering e, sorted.
  std::vector<std::pair<RelationId, EntityId>> in_neighbors(EntityId e, SplitMask mask) const {
    check_entity(e);
    return select(in_[e], mask);
  }

 private:
  void check_entity(EntityId e) const {
    if (e >= num_entities()) throw IndexError("entity id " + std::to_string(e) + " out of range");
  }
  void check_relation(RelationId r) const {
    if (r >= num_relations()) throw IndexError("relation id " + std::to_string(r) + " out of range");
  }

  static void normalize(std::vector<Tagged>& v) {
    std::sort(v.begin(), v.end(), [](const Tagged& a, const Tagged& b) { return a.id < b.id; });
    std::size_t w = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (w > 0 && v[w - 1].id == v[i].id) {
        v[w - 1].splits |= v[i].splits;
      } else {
        v[w++] = v[i];
      }
    }
    v.resize(w);
  }

  static void normalize(std::vector<Neighbor>& v) {
    auto key = [](const Neighbor& n) { return std::pair(n.relation, n.entity); };
    std::sort(v.begin(), v.end(), [&](const Neighbor& a, const Neighbor& b) { return key(a) < key(b); });
    std::size_t w = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (w > 0 && key(v[w - 1]) == key(v[i])) {
        v[w - 1].splits |= v[i].splits;
      } else {
        v[w++] = v[i];
      }
    }
    v.resize(w);
  }

  static std::vector<EntityId> select(const std::vector<Tagged>& v, SplitMask mask) {
    std::vector<EntityId> out;
    for (const auto& e : v) {
      if (e.splits & mask) out.push_back(e.id);
    }
    return out;
  }

  static std::vector<EntityId> select(const std::unordered_map<std::uint64_t, std::vector<Tagged>>& index,
                                      std::uint64_t key, SplitMask mask) {
    auto it = index.find(key);
    if (it == index.end()) return {};
    return select(it->second, mask);
  }

  static std::vector<std::pair<RelationId, EntityId>> select(const std::vector<Neighbor>& v, SplitMask mask) {
    std::vector<std::pair<RelationId, EntityId>> out;
    for (const auto& n : v) {
      if (n.splits & mask) out.emplace_back(n.relation, n.entity);
    }
    return out;
  }

  void build() {
    const std::size_t ne = num_entities();
    const std::size_t nr = num_relations();
    relation_targets_.assign(nr, {});
    relation_sources_.assign(nr, {});
    out_.assign(ne, {});
    in_.assign(ne, {});
    for (std::size_t s = 0; s < splits_.size(); ++s) {
      const SplitMask bit = mask_of(static_cast<Split>(s));
      for (const auto& t : splits_[s]) {
        if (t.source >= ne || t.target >= ne || t.relation >= nr) {
          throw IndexError("triple (" + std::to_string(t.source) + "," + std::to_string(t.relation) + "," +
                           std::to_string(t.target) + ") out of dictionary bounds");
        }
        membership_[t] |= bit;
        sr_targets_[detail::pair_key(t.source, t.relation)].push_back({t.target, bit});
        rt_sources_[detail::pair_key(t.relation, t.target)].push_back({t.source, bit});
        relation_targets_[t.relation].push_back({t.target, bit});
        relation_sources_[t.relation].push_back({t.source, bit});
        out_[t.source].push_back({t.relation, t.target, bit});
        in_[t.target].push_back({t.relation, t.source, bit});
      }
    }
    for (auto& [k, v] : sr_targets_) normalize(v);
    for (auto& [k, v] : rt_sources_) normalize(v);
    for (auto& v : relation_targets_) normalize(v);
    for (auto& v : relation_sources_) normalize(v);
    for (auto& v : out_) normalize(v);
    for (auto& v : in_) normalize(v);
  }

  Dictionary entities_;
  Dictionary relations_;
  std::array<std::vector<Triple>, 3> splits_;
  std::unordered_map<Triple, SplitMask, TripleHash> membership_;
  std::unordered_map<std::uint64_t, std::vector<Tagged>> sr_targets_;
  std::unordered_map<std::uint64_t, std::vector<Tagged>> rt_sources_;
  std::vector<std::vector<Tagged>> relation_targets_;
  std::vector<std::vector<Tagged>> relation_sources_;
  std::vector<std::vector<Neighbor>> out_;
  std::vector<std::vector<Neighbor>> in_;
};

inline TripleStore build_indexes(Dictionary entities, Dictionary relations, std::vector<Triple> train,
                                 std::vector<Triple> dev = {}, std::vector<Triple> test = {}) {
  return TripleStore(std::move(entities), std::move(relations), {std::move(train), std::move(dev), std::move(test)});
}

struct DatasetFiles {
  std::filesystem::path train;
  std::filesystem::path dev;
  std::filesystem::path test;
  std::optional<std::filesystem::path> types;
  std::optional<std::filesystem::path> entity_ids;
  std::optional<std::filesystem::path> relation_ids;
};

// Resolves train.txt, valid.txt (or dev.txt), test.txt and an optional
// types.txt inside a dataset directory.
inline DatasetFiles locate_dataset(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("dataset directory not found: " + dir.string());
  DatasetFiles files;
  auto pick = [&](std::initializer_list<const char*> names, bool required) -> fs::path {
    for (const char* n : names) {
      if (fs::exists(dir / n)) return dir / n;
    }
    if (required) throw IoError("missing " + std::string(*names.begin()) + " in " + dir.string());
    return {};
  };
  files.train = pick({"train.txt"}, true);
  files.dev = pick({"valid.txt", "dev.txt"}, false);
  files.test = pick({"test.txt"}, false);
  if (fs::exists(dir / "types.txt")) files.types = dir / "types.txt";
  if (fs::exists(dir / "entity_ids.txt")) files.entity_ids = dir / "entity_ids.txt";
  if (fs::exists(dir / "relation_ids.txt")) files.relation_ids = dir / "relation_ids.txt";
  return files;
}

inline void load_vocabulary(const std::filesystem::path& path, Dictionary& dict) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary file " + path.string());
  std::string raw;
  while (std::getline(in, raw)) {
    auto name = detail::chomp(raw);
    if (!name.empty()) dict.intern(name);
  }
}

inline void write_vocabulary(const std::filesystem::path& path, const Dictionary& dict) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write vocabulary file " + path.string());
  for (const auto& n : dict.names()) out << n << '\n';
}

// Loads all three splits with a growing vocabulary (train, then dev, then
// test). entity_ids.txt / relation_ids.txt, when present, fix the id order
// up front.
inline TripleStore load_dataset(const std::filesystem::path& dir) {
  auto files = locate_dataset(dir);
  Dictionary entities;
  Dictionary relations;
  if (files.entity_ids) load_vocabulary(*files.entity_ids, entities);
  if (files.relation_ids) load_vocabulary(*files.relation_ids, relations);
  auto train = load_split(files.train, entities, relations, true);
  std::vector<Triple> dev;
  std::vector<Triple> test;
  if (!files.dev.empty()) dev = load_split(files.dev, entities, relations, true);
  if (!files.test.empty()) test = load_split(files.test, entities, relations, true);
  return build_indexes(std::move(entities), std::move(relations), std::move(train), std::move(dev), std::move(test));
}

inline void save_dataset(const std::filesystem::path& dir, const TripleStore& store) {
  std::filesystem::create_directories(dir);
  write_vocabulary(dir / "entity_ids.txt", store.entities());
  write_vocabulary(dir / "relation_ids.txt", store.relations());
  write_split(dir / "train.txt", store.train(), store.entities(), store.relations());
  write_split(dir / "valid.txt", store.dev(), store.entities(), store.relations());
  write_split(dir / "test.txt", store.test(), store.entities(), store.relations());
}

}  // namespace kgneg
