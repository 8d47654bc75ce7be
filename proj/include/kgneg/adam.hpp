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
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "kgneg/error.hpp"
#include "kgneg/loss.hpp"
#include "kgneg/model.hpp"

namespace kgneg {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Row-sparse Adam moments; a row gets moments the first time it receives a
// gradient.
struct AdamState {
  struct Moments {
    std::vector<double> m;
    std::vector<double> v;
  };

  AdamConfig config;
  std::uint64_t step_count = 0;
  std::unordered_map<EntityId, Moments> entity_moments;
  std::unordered_map<RelationId, Moments> relation_moments;

  AdamState() = default;
  explicit AdamState(AdamConfig cfg) : config(cfg) {}
};

namespace detail {

inline bool all_finite(const SparseGradients& g) {
  for (const auto& [e, row] : g.entity_rows) {
    for (double x : row) {
      if (!std::isfinite(x)) return false;
    }
  }
  for (const auto& [r, row] : g.relation_rows) {
    for (double x : row) {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

inline void adam_row(const AdamConfig& cfg, double bc1, double bc2, double decay, AdamState::Moments& mom,
                     const std::vector<double>& grad, std::span<double> theta) {
  if (mom.m.empty()) {
    mom.m.assign(grad.size(), 0.0);
    mom.v.assign(grad.size(), 0.0);
  }
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double g = grad[i];
    mom.m[i] = cfg.beta1 * mom.m[i] + (1.0 - cfg.beta1) * g;
    mom.v[i] = cfg.beta2 * mom.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = mom.m[i] / bc1;
    const double v_hat = mom.v[i] / bc2;
    theta[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    theta[i] -= decay * theta[i];
  }
}

}  // namespace detail

// One bias-corrected Adam update of every row in `grads`, then decoupled L2
// decay theta -= lr * lambda * theta on those rows, then unit-norm
// projection of the touched entity rows. Rejects non-finite gradients
// without modifying anything.
inline void adam_step(AdamState& state, ModelParams& params, const SparseGradients& grads, double l2_lambda) {
  if (!detail::all_finite(grads)) throw NumericError("adam_step: non-finite gradient");
  if (grads.empty()) return;
  const auto& cfg = state.config;
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  const double decay = cfg.lr * l2_lambda;
  for (const auto& [e, grad] : grads.entity_rows) {
    auto row = params.entity(e);
    detail::adam_row(cfg, bc1, bc2, decay, state.entity_moments[e], grad, row);
    normalize_row(row);
  }
  for (const auto& [r, grad] : grads.relation_rows) {
    detail::adam_row(cfg, bc1, bc2, decay, state.relation_moments[r], grad, params.relation(r));
  }
}

}  // namespace kgneg
