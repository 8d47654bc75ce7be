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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgneg/error.hpp"
#include "kgneg/random.hpp"
#include "kgneg/triple_store.hpp"

namespace kgneg {

enum class Family : std::uint8_t { kRescal = 0, kTransE = 1, kDistMult = 2, kComplEx = 3 };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::kRescal: return "rescal";
    case Family::kTransE: return "transe";
    case Family::kDistMult: return "distmult";
    case Family::kComplEx: return "complex";
  }
  return "?";
}

inline std::optional<Family> parse_family(std::string_view name) {
  if (name == "rescal") return Family::kRescal;
  if (name == "transe") return Family::kTransE;
  if (name == "distmult") return Family::kDistMult;
  if (name == "complex") return Family::kComplEx;
  return std::nullopt;
}

// Entity and relation tables for one model family, stored row-major.
// ComplEx rows hold the real half followed by the imaginary half.
struct ModelParams {
  Family family = Family::kDistMult;
  std::size_t dim = 0;
  std::size_t num_entities = 0;
  std::size_t num_relations = 0;
  std::vector<double> entities;
  std::vector<double> relations;

  ModelParams() = default;
  ModelParams(Family f, std::size_t d, std::size_t ne, std::size_t nr)
      : family(f), dim(d), num_entities(ne), num_relations(nr) {
    if (d == 0) throw Error("model dimension must be at least 1");
    entities.assign(ne * entity_width(), 0.0);
    relations.assign(nr * relation_width(), 0.0);
  }

  std::size_t entity_width() const { return family == Family::kComplEx ? 2 * dim : dim; }
  std::size_t relation_width() const {
    switch (family) {
      case Family::kRescal: return dim * dim;
      case Family::kComplEx: return 2 * dim;
      default: return dim;
    }
  }

  std::span<double> entity(EntityId e) { return {entities.data() + e * entity_width(), entity_width()}; }
  std::span<const double> entity(EntityId e) const {
    return {entities.data() + e * entity_width(), entity_width()};
  }
  std::span<double> relation(RelationId r) { return {relations.data() + r * relation_width(), relation_width()}; }
  std::span<const double> relation(RelationId r) const {
    return {relations.data() + r * relation_width(), relation_width()};
  }

  bool operator==(const ModelParams&) const = default;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline void normalize_row(std::span<double> row) {
  const double n = l2_norm(row);
  if (n > 0.0) {
    for (double& x : row) x /= n;
  }
}

// Entities and relation vectors uniform in [-6/sqrt(d), 6/sqrt(d)], entity rows
// then projected to unit norm; RESCAL matrices uniform in [-6/d, 6/d].
inline ModelParams init_params(Family family, std::size_t dim, std::size_t num_entities, std::size_t num_relations,
                               std::uint64_t seed) {
  ModelParams p(family, dim, num_entities, num_relations);
  Rng rng = make_rng(seed, Stream::kInit);
  const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
  std::uniform_real_distribution<double> vec(-bound, bound);
  for (double& x : p.entities) x = vec(rng);
  for (EntityId e = 0; e < num_entities; ++e) normalize_row(p.entity(e));
  if (family == Family::kRescal) {
    const double mbound = 6.0 / static_cast<double>(dim);
    std::uniform_real_distribution<double> mat(-mbound, mbound);
    for (double& x : p.relations) x = mat(rng);
  } else {
    for (double& x : p.relations) x = vec(rng);
  }
  return p;
}

enum class Direction : std::uint8_t { kPredictTarget, kPredictSource };

struct Query {
  EntityId entity;  // the fixed side: source when predicting targets, target otherwise
  RelationId relation;
  Direction direction;
};

struct ScoredCandidates {
  Query query;
  std::vector<EntityId> candidates;
  std::vector<double> scores;
};

namespace detail {

// v^T W for row-major W.
inline void row_times_matrix(std::span<const double> v, std::span<const double> w, std::size_t d,
                             std::span<double> out) {
  for (std::size_t j = 0; j < d; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double vi = v[i];
    const double* row = w.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) out[j] += vi * row[j];
  }
}

// W v for row-major W.
inline void matrix_times_vector(std::span<const double> w, std::span<const double> v, std::size_t d,
                                std::span<double> out) {
  for (std::size_t i = 0; i < d; ++i) {
    const double* row = w.data() + i * d;
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) acc += row[j] * v[j];
    out[i] = acc;
  }
}

inline void check_ids(const ModelParams& p, EntityId s, RelationId r, EntityId t) {
  if (s >= p.num_entities || t >= p.num_entities || r >= p.num_relations) {
    throw IndexError("score: id out of model bounds");
  }
}

}  // namespace detail

inline double score(const ModelParams& p, EntityId s, RelationId r, EntityId t) {
  detail::check_ids(p, s, r, t);
  const auto xs = p.entity(s);
  const auto xr = p.relation(r);
  const auto xt = p.entity(t);
  const std::size_t d = p.dim;
  switch (p.family) {
    case Family::kRescal: {
      double acc = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < d; ++j) row += xr[i * d + j] * xt[j];
        acc += xs[i] * row;
      }
      return acc;
    }
    case Family::kTransE: {
      double acc = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double v = xs[i] + xr[i] - xt[i];
        acc += v * v;
      }
      return -std::sqrt(acc);
    }
    case Family::kDistMult: {
      double acc = 0.0;
      for (std::size_t i = 0; i < d; ++i) acc += xs[i] * xr[i] * xt[i];
      return acc;
    }
    case Family::kComplEx: {
      double acc = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double as = xs[i], bs = xs[d + i];
        const double ar = xr[i], br = xr[d + i];
        const double at = xt[i], bt = xt[d + i];
        acc += as * ar * at + bs * ar * bt + as * br * bt - bs * br * at;
      }
      return acc;
    }
  }
  return 0.0;
}

inline double score(const ModelParams& p, const Triple& t) { return score(p, t.source, t.relation, t.target); }

// Forward and backward predictions: v_t is what the model expects for the
// target given (s, r), v_s what it expects for the source given (r, t). For
// the bilinear families score(s, r, t) = <v_t, x_t> = <x_s, v_s>; for TransE
// score = -|v_t - x_t| = -|x_s - v_s|.
struct PredictedVectors {
  std::vector<double> target;
  std::vector<double> source;
};

inline std::vector<double> predict_target(const ModelParams& p, EntityId s, RelationId r) {
  const auto xs = p.entity(s);
  const auto xr = p.relation(r);
  const std::size_t d = p.dim;
  std::vector<double> v(p.entity_width());
  switch (p.family) {
    case Family::kRescal: detail::row_times_matrix(xs, xr, d, v); break;
    case Family::kTransE:
      for (std::size_t i = 0; i < d; ++i) v[i] = xs[i] + xr[i];
      break;
    case Family::kDistMult:
      for (std::size_t i = 0; i < d; ++i) v[i] = xs[i] * xr[i];
      break;
    case Family::kComplEx:
      // x_s * x_r
      for (std::size_t i = 0; i < d; ++i) {
        v[i] = xs[i] * xr[i] - xs[d + i] * xr[d + i];
        v[d + i] = xs[d + i] * xr[i] + xs[i] * xr[d + i];
      }
      break;
  }
  return v;
}

inline std::vector<double> predict_source(const ModelParams& p, RelationId r, EntityId t) {
  const auto xt = p.entity(t);
  const auto xr = p.relation(r);
  const std::size_t d = p.dim;
  std::vector<double> v(p.entity_width());
  switch (p.family) {
    case Family::kRescal: detail::matrix_times_vector(xr, xt, d, v); break;
    case Family::kTransE:
      for (std::size_t i = 0; i < d; ++i) v[i] = xt[i] - xr[i];
      break;
    case Family::kDistMult:
      for (std::size_t i = 0; i < d; ++i) v[i] = xt[i] * xr[i];
      break;
    case Family::kComplEx:
      // x_t * conj(x_r)
      for (std::size_t i = 0; i < d; ++i) {
        v[i] = xt[i] * xr[i] + xt[d + i] * xr[d + i];
        v[d + i] = xt[d + i] * xr[i] - xt[i] * xr[d + i];
      }
      break;
  }
  return v;
}

inline PredictedVectors predicted_vectors(const ModelParams& p, EntityId s, RelationId r, EntityId t) {
  detail::check_ids(p, s, r, t);
  return {predict_target(p, s, r), predict_source(p, r, t)};
}

// Scores one query against a candidate list, reusing the query-side product.
inline void score_candidates_into(const ModelParams& p, const Query& q, std::span<const EntityId> candidates,
                                  std::span<double> out) {
  if (q.entity >= p.num_entities || q.relation >= p.num_relations) throw IndexError("query id out of model bounds");
  const bool forward = q.direction == Direction::kPredictTarget;
  const auto v = forward ? predict_target(p, q.entity, q.relation) : predict_source(p, q.relation, q.entity);
  const std::size_t w = p.entity_width();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const EntityId c = candidates[i];
    if (c >= p.num_entities) throw IndexError("candidate id out of model bounds");
    const auto xc = p.entity(c);
    if (p.family == Family::kTransE) {
      double acc = 0.0;
      for (std::size_t k = 0; k < w; ++k) {
        const double diff = forward ? v[k] - xc[k] : xc[k] - v[k];
        acc += diff * diff;
      }
      out[i] = -std::sqrt(acc);
    } else {
      out[i] = dot(v, xc);
    }
  }
}

inline ScoredCandidates score_candidates(const ModelParams& p, const Query& q, std::vector<EntityId> candidates) {
  if (candidates.empty()) throw Error("score_candidates: empty candidate list");
  ScoredCandidates out{q, std::move(candidates), {}};
  out.scores.resize(out.candidates.size());
  score_candidates_into(p, q, out.candidates, out.scores);
  return out;
}

// Scores every entity as the open slot of the query.
inline std::vector<double> score_all(const ModelParams& p, const Query& q) {
  std::vector<EntityId> all(p.num_entities);
  for (EntityId e = 0; e < p.num_entities; ++e) all[e] = e;
  std::vector<double> out(all.size());
  score_candidates_into(p, q, all, out);
  return out;
}

}  // namespace kgneg
