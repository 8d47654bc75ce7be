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

// Trains DistMult with corrupt sampling on the synthetic typed KG, then
// fine-tunes it with near-miss negatives proposed by the trained model.

#include <iostream>
#include <memory>

#include "kgneg/kgneg.hpp"

int main() {
  using namespace kgneg;
  const auto kg = generate_synthetic_kg();
  const auto& store = kg.store;
  std::cout << store.num_entities() << " entities, " << store.num_relations() << " relations, "
            << store.train().size() << " training triples\n";

  TrainConfig cfg;
  cfg.n_s = 5;
  cfg.batch_size = 64;
  cfg.max_epochs = 100;
  cfg.eval_every = 10;
  cfg.patience = 3;
  cfg.adam.lr = 0.01;

  CorruptSampler corrupt(store);
  auto base = train(store, init_params(Family::kDistMult, 32, store.num_entities(), store.num_relations(), 1),
                    corrupt, cfg, [](const EpochRecord& r) {
                      if (r.dev_mrr) std::cout << "epoch " << r.epoch << " dev MRR " << *r.dev_mrr << '\n';
                    });

  const auto stats = compute_stats(store);
  const auto before = evaluate(base.params, store, Split::kTest, stats);
  std::cout << "corrupt:   test MRR " << before.mrr << ", hits@10 " << before.hits.at(10) << '\n';

  auto frozen = std::make_shared<const FrozenSamplerModel>(base.params);
  NearMissSampler near_miss(store, frozen);
  const Triple& example = store.train().front();
  Rng rng(0);
  const auto negs = near_miss.sample(example, 3, rng);
  std::cout << "near-miss targets for (" << store.entities().name(example.source) << ", "
            << store.relations().name(example.relation) << ", ?):";
  for (EntityId id : negs.neg_targets) std::cout << ' ' << store.entities().name(id);
  std::cout << '\n';

  cfg.adam.lr = 0.001;
  cfg.eval_every = 1;
  auto tuned = fine_tune(store, base.params, near_miss, cfg);
  const auto after = evaluate(tuned.params, store, Split::kTest, stats);
  std::cout << "near-miss: test MRR " << after.mrr << ", hits@10 " << after.hits.at(10) << '\n';
  return 0;
}
