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
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kgneg/adam.hpp"
#include "kgneg/error.hpp"
#include "kgneg/evaluator.hpp"
#include "kgneg/loss.hpp"
#include "kgneg/model.hpp"
#include "kgneg/random.hpp"
#include "kgneg/samplers.hpp"
#include "kgneg/triple_store.hpp"

namespace kgneg {

struct TrainConfig {
  std::size_t n_s = 1;  // negatives per positive per side
  std::size_t batch_size = 512;
  std::size_t max_epochs = 100;
  std::size_t patience = 3;  // evaluations without dev improvement
  std::size_t eval_every = 1;
  std::uint64_t seed = 0;
  std::size_t fine_tune_epochs = 5;
  std::size_t dev_eval_limit = 1000;  // 0 = whole dev split
  SplitMask dev_filter = kTrainDev;
  std::size_t threads = 0;
  MarginLossConfig loss;
  AdamConfig adam;

  void validate() const {
    if (n_s < 1) throw ConfigError("n_s must be at least 1");
    if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
    if (eval_every < 1) throw ConfigError("eval_every must be at least 1");
    if (!(loss.margin > 0.0)) throw ConfigError("margin must be positive");
    if (loss.l2_lambda < 0.0) throw ConfigError("l2_lambda must be non-negative");
  }
};

struct EpochRecord {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  std::optional<double> dev_mrr;
  double elapsed_seconds = 0.0;
};

struct TrainingLog {
  std::vector<EpochRecord> epochs;

  void write_csv(std::ostream& out) const {
    out << "epoch,mean_loss,dev_mrr,elapsed_seconds\n";
    for (const auto& r : epochs) {
      out << r.epoch << ',' << r.mean_loss << ',';
      if (r.dev_mrr) out << *r.dev_mrr;
      out << ',' << r.elapsed_seconds << '\n';
    }
  }
};

struct TrainResult {
  ModelParams params;
  TrainingLog log;
  std::optional<double> best_dev_mrr;
  std::size_t best_epoch = 0;  // 0 when no dev evaluation happened
};

using EpochCallback = std::function<void(const EpochRecord&)>;

namespace detail {

inline std::vector<Triple> dev_subset(const TripleStore& store, const TrainConfig& cfg) {
  const auto& dev = store.dev();
  if (cfg.dev_eval_limit == 0 || dev.size() <= cfg.dev_eval_limit) return dev;
  std::vector<std::size_t> idx(dev.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng = make_rng(cfg.seed, Stream::kDevSubsample);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(cfg.dev_eval_limit);
  std::sort(idx.begin(), idx.end());
  std::vector<Triple> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(dev[i]);
  return out;
}

}  // namespace detail

// Mini-batch max-margin training with Adam. Shuffling and sampling draw from
// substreams of cfg.seed. Dev MRR (filtered over cfg.dev_filter) is checked
// every eval_every epochs; training stops after `patience` evaluations
// without improvement and the best-dev parameters are returned.
inline TrainResult train(const TripleStore& store, ModelParams params, const NegativeSampler& sampler,
                         const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  cfg.validate();
  if (params.num_entities != store.num_entities() || params.num_relations != store.num_relations()) {
    throw Error("train: model shape does not match the store's dictionaries");
  }
  TrainResult result;
  const auto& train_triples = store.train();
  const auto dev = detail::dev_subset(store, cfg);
  AdamState adam(cfg.adam);
  Rng shuffle_rng = make_rng(cfg.seed, Stream::kShuffle);
  Rng sample_rng = make_rng(cfg.seed, Stream::kSampling);
  std::vector<std::size_t> order(train_triples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  EvalOptions dev_opts;
  dev_opts.ks = {1, 10};
  dev_opts.filter = cfg.dev_filter;
  dev_opts.threads = cfg.threads;

  std::optional<ModelParams> best;
  std::size_t stale = 0;
  const auto start = std::chrono::steady_clock::now();

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      SparseGradients grads;
      for (std::size_t i = begin; i < end; ++i) {
        const Triple& pos = train_triples[order[i]];
        NegativeBatch negs;
        try {
          negs = sampler.sample(pos, cfg.n_s, sample_rng);
        } catch (const Error& e) {
          throw Error(std::string("sampler '") + sampler_name(sampler.kind()) + "' failed in epoch " +
                      std::to_string(epoch) + ": " + e.what());
        }
        accumulate_loss_gradients(params, pos, negs, cfg.loss, grads);
      }
      epoch_loss += grads.loss;
      adam_step(adam, params, grads, cfg.loss.l2_lambda);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_loss = train_triples.empty() ? 0.0 : epoch_loss / static_cast<double>(train_triples.size());
    bool stop = false;
    if (!dev.empty() && epoch % cfg.eval_every == 0) {
      const double dev_mrr = evaluate(params, store, dev, nullptr, dev_opts).mrr;
      rec.dev_mrr = dev_mrr;
      if (!result.best_dev_mrr || dev_mrr > *result.best_dev_mrr) {
        result.best_dev_mrr = dev_mrr;
        result.best_epoch = epoch;
        best = params;
        stale = 0;
      } else if (++stale >= cfg.patience) {
        stop = true;
      }
    }
    rec.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (stop) break;
  }
  result.params = best ? std::move(*best) : std::move(params);
  return result;
}

// Runs exactly cfg.fine_tune_epochs epochs from pre-trained parameters with
// an embedding-based sampler, returning the best-dev epoch among them.
inline TrainResult fine_tune(const TripleStore& store, ModelParams pretrained, const NegativeSampler& sampler,
                             const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  if (!is_embedding_sampler(sampler.kind())) throw ConfigError("fine_tune expects the nn or nmiss sampler");
  TrainConfig ft = cfg;
  ft.max_epochs = cfg.fine_tune_epochs;
  ft.patience = std::numeric_limits<std::size_t>::max();
  return train(store, std::move(pretrained), sampler, ft, on_epoch);
}

}  // namespace kgneg
