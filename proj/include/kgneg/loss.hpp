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
#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "kgneg/error.hpp"
#include "kgneg/model.hpp"

namespace kgneg {

struct MarginLossConfig {
  double margin = 1.0;
  double l2_lambda = 0.0;  // applied by the optimizer as decoupled decay
};

// Sum over negatives of max(0, margin - pos + neg).
inline double margin_loss(double pos_score, std::span<const double> neg_scores, const MarginLossConfig& cfg) {
  if (neg_scores.empty()) throw Error("margin_loss: no negative scores");
  double total = 0.0;
  for (double n : neg_scores) total += std::max(0.0, cfg.margin - pos_score + n);
  return total;
}

// Negative entity ids for one positive triple, per corrupted side.
struct NegativeBatch {
  std::vector<EntityId> neg_sources;
  std::vector<EntityId> neg_targets;

  bool empty() const { return neg_sources.empty() && neg_targets.empty(); }
};

// Row-sparse gradient keyed by entity / relation id. Ordered maps make the
// accumulation and apply order deterministic.
struct SparseGradients {
  std::map<EntityId, std::vector<double>> entity_rows;
  std::map<RelationId, std::vector<double>> relation_rows;
  double loss = 0.0;
  std::size_t active_terms = 0;

  bool empty() const { return entity_rows.empty() && relation_rows.empty(); }

  std::vector<double>& entity_row(EntityId e, std::size_t width) {
    auto& row = entity_rows[e];
    if (row.empty()) row.assign(width, 0.0);
    return row;
  }
  std::vector<double>& relation_row(RelationId r, std::size_t width) {
    auto& row = relation_rows[r];
    if (row.empty()) row.assign(width, 0.0);
    return row;
  }

  void merge(const SparseGradients& other) {
    for (const auto& [e, g] : other.entity_rows) {
      auto& row = entity_row(e, g.size());
      for (std::size_t i = 0; i < g.size(); ++i) row[i] += g[i];
    }
    for (const auto& [r, g] : other.relation_rows) {
      auto& row = relation_row(r, g.size());
      for (std::size_t i = 0; i < g.size(); ++i) row[i] += g[i];
    }
    loss += other.loss;
    active_terms += other.active_terms;
  }
};

namespace detail {

// Adds coeff * d score(s, r, t) / d theta into grads.
inline void accumulate_score_gradient(const ModelParams& p, EntityId s, RelationId r, EntityId t, double coeff,
                                      SparseGradients& grads) {
  const std::size_t d = p.dim;
  const std::size_t ew = p.entity_width();
  const std::size_t rw = p.relation_width();
  const auto xs = p.entity(s);
  const auto xr = p.relation(r);
  const auto xt = p.entity(t);
  // Copies guard against s == t aliasing through the map.
  std::vector<double> gs(ew, 0.0), gt(ew, 0.0), gr(rw, 0.0);
  switch (p.family) {
    case Family::kRescal:
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          const double w = xr[i * d + j];
          gs[i] += w * xt[j];
          gt[j] += w * xs[i];
          gr[i * d + j] = xs[i] * xt[j];
        }
      }
      break;
    case Family::kTransE: {
      std::vector<double> v(d);
      for (std::size_t i = 0; i < d; ++i) v[i] = xs[i] + xr[i] - xt[i];
      const double n = std::max(l2_norm(v), 1e-12);
      for (std::size_t i = 0; i < d; ++i) {
        gs[i] = -v[i] / n;
        gr[i] = -v[i] / n;
        gt[i] = v[i] / n;
      }
      break;
    }
    case Family::kDistMult:
      for (std::size_t i = 0; i < d; ++i) {
        gs[i] = xr[i] * xt[i];
        gr[i] = xs[i] * xt[i];
        gt[i] = xs[i] * xr[i];
      }
      break;
    case Family::kComplEx:
      for (std::size_t i = 0; i < d; ++i) {
        const double as = xs[i], bs = xs[d + i];
        const double ar = xr[i], br = xr[d + i];
        const double at = xt[i], bt = xt[d + i];
        gs[i] = ar * at + br * bt;
        gs[d + i] = ar * bt - br * at;
        gr[i] = as * at + bs * bt;
        gr[d + i] = as * bt - bs * at;
        gt[i] = as * ar - bs * br;
        gt[d + i] = bs * ar + as * br;
      }
      break;
  }
  auto add = [coeff](std::vector<double>& dst, const std::vector<double>& src) {
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += coeff * src[i];
  };
  add(grads.entity_row(s, ew), gs);
  add(grads.entity_row(t, ew), gt);
  add(grads.relation_row(r, rw), gr);
}

}  // namespace detail

// Adds the hinge loss of one positive against its corrupted targets and
// sources, with analytic gradients of every active term, into `grads`.
inline void accumulate_loss_gradients(const ModelParams& p, const Triple& positive, const NegativeBatch& negatives,
                                      const MarginLossConfig& cfg, SparseGradients& grads) {
  if (negatives.empty()) return;
  const double pos = score(p, positive);
  auto term = [&](const Triple& neg) {
    const double h = cfg.margin - pos + score(p, neg);
    if (h <= 0.0) return;
    grads.loss += h;
    ++grads.active_terms;
    detail::accumulate_score_gradient(p, positive.source, positive.relation, positive.target, -1.0, grads);
    detail::accumulate_score_gradient(p, neg.source, neg.relation, neg.target, 1.0, grads);
  };
  for (EntityId t : negatives.neg_targets) term({positive.source, positive.relation, t});
  for (EntityId s : negatives.neg_sources) term({s, positive.relation, positive.target});
}

inline SparseGradients loss_gradients(const ModelParams& p, const Triple& positive, const NegativeBatch& negatives,
                                      const MarginLossConfig& cfg) {
  SparseGradients grads;
  accumulate_loss_gradients(p, positive, negatives, cfg, grads);
  return grads;
}

// Loss only, for reporting and finite-difference checks.
inline double triple_loss(const ModelParams& p, const Triple& positive, const NegativeBatch& negatives,
                          const MarginLossConfig& cfg) {
  const double pos = score(p, positive);
  double total = 0.0;
  for (EntityId t : negatives.neg_targets) {
    total += std::max(0.0, cfg.margin - pos + score(p, positive.source, positive.relation, t));
  }
  for (EntityId s : negatives.neg_sources) {
    total += std::max(0.0, cfg.margin - pos + score(p, s, positive.relation, positive.target));
  }
  return total;
}

}  // namespace kgneg
