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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgneg/error.hpp"
#include "kgneg/triple_store.hpp"

namespace kgneg {

using TypeId = std::uint32_t;

struct RelationSignature {
  TypeId domain;
  TypeId range;
};

// Entity type labels and relation domain/range signatures.
class TypeCatalog {
 public:
  TypeCatalog() = default;
  TypeCatalog(std::size_t num_entities, std::size_t num_relations)
      : entity_types_(num_entities), signatures_(num_relations) {}

  void add_entity_type(EntityId e, std::string_view label) {
    if (e >= entity_types_.size()) throw IndexError("entity id out of range in type catalog");
    const TypeId type = intern(label);
    insert_sorted(entity_types_[e], type);
    insert_sorted(entities_of_type_[type], e);
  }

  void set_signature(RelationId r, std::string_view domain, std::string_view range) {
    if (r >= signatures_.size()) throw IndexError("relation id out of range in type catalog");
    signatures_[r] = RelationSignature{intern(domain), intern(range)};
  }

  const std::vector<TypeId>& entity_types(EntityId e) const { return entity_types_.at(e); }
  const std::optional<RelationSignature>& signature(RelationId r) const { return signatures_.at(r); }
  std::optional<RelationSignature> find_signature(RelationId r) const {
    return r < signatures_.size() ? signatures_[r] : std::nullopt;
  }

  const std::vector<EntityId>& entities_with_type(TypeId type) const {
    static const std::vector<EntityId> kEmpty;
    return type < entities_of_type_.size() ? entities_of_type_[type] : kEmpty;
  }

  bool has_type(EntityId e, TypeId type) const {
    const auto& ts = entity_types_.at(e);
    return std::binary_search(ts.begin(), ts.end(), type);
  }

  std::vector<std::string> type_names(EntityId e) const {
    std::vector<std::string> out;
    for (TypeId t : entity_types(e)) out.push_back(types_.name(t));
    return out;
  }

  const Dictionary& types() const { return types_; }
  std::size_t num_signatures() const {
    return static_cast<std::size_t>(std::count_if(signatures_.begin(), signatures_.end(),
                                                  [](const auto& s) { return s.has_value(); }));
  }
  bool empty() const { return types_.size() == 0; }

  // Records naming entities or relations the store does not know.
  std::size_t skipped() const { return skipped_; }
  void note_skipped() { ++skipped_; }

 private:
  TypeId intern(std::string_view label) {
    const TypeId id = types_.intern(label);
    if (entities_of_type_.size() <= id) entities_of_type_.resize(id + 1);
    return id;
  }

  template <typename T>
  static void insert_sorted(std::vector<T>& v, T x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x) v.insert(it, x);
  }

  Dictionary types_;
  std::vector<std::vector<TypeId>> entity_types_;
  std::vector<std::optional<RelationSignature>> signatures_;
  std::vector<std::vector<EntityId>> entities_of_type_;
  std::size_t skipped_ = 0;
};

// Reads `T<TAB>entity<TAB>type` and `R<TAB>relation<TAB>domain<TAB>range`
// records.
inline TypeCatalog parse_type_catalog(std::istream& in, const std::string& source_name, const TripleStore& store) {
  TypeCatalog catalog(store.num_entities(), store.num_relations());
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = detail::chomp(raw);
    if (line.empty()) continue;
    auto cols = detail::split_tabs(line);
    for (auto c : cols) {
      if (c.empty()) throw ParseError(source_name, line_no, "empty column");
    }
    if (cols[0] == "T") {
      if (cols.size() != 3) throw ParseError(source_name, line_no, "type record needs 3 columns");
      auto e = store.entities().find(cols[1]);
      if (!e) {
        catalog.note_skipped();
        continue;
      }
      catalog.add_entity_type(*e, cols[2]);
    } else if (cols[0] == "R") {
      if (cols.size() != 4) throw ParseError(source_name, line_no, "signature record needs 4 columns");
      auto r = store.relations().find(cols[1]);
      if (!r) {
        catalog.note_skipped();
        continue;
      }
      catalog.set_signature(*r, cols[2], cols[3]);
    } else {
      throw ParseError(source_name, line_no, "unknown record tag '" + std::string(cols[0]) + "'");
    }
  }
  return catalog;
}

inline TypeCatalog load_type_catalog(const std::filesystem::path& path, const TripleStore& store) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open type file " + path.string());
  return parse_type_catalog(in, path.string(), store);
}

inline void write_type_catalog(const std::filesystem::path& path, const TypeCatalog& catalog,
                               const TripleStore& store) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write type file " + path.string());
  for (EntityId e = 0; e < store.num_entities(); ++e) {
    for (TypeId t : catalog.entity_types(e)) {
      out << "T\t" << store.entities().name(e) << '\t' << catalog.types().name(t) << '\n';
    }
  }
  for (RelationId r = 0; r < store.num_relations(); ++r) {
    if (const auto& sig = catalog.signature(r)) {
      out << "R\t" << store.relations().name(r) << '\t' << catalog.types().name(sig->domain) << '\t'
          << catalog.types().name(sig->range) << '\n';
    }
  }
}

}  // namespace kgneg
