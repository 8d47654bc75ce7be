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

#include "kgneg/adam.hpp"
#include "kgneg/ball_tree.hpp"
#include "kgneg/checkpoint.hpp"
#include "kgneg/dataset_stats.hpp"
#include "kgneg/error.hpp"
#include "kgneg/evaluator.hpp"
#include "kgneg/experiment.hpp"
#include "kgneg/loss.hpp"
#include "kgneg/metrics.hpp"
#include "kgneg/model.hpp"
#include "kgneg/parallel.hpp"
#include "kgneg/random.hpp"
#include "kgneg/samplers.hpp"
#include "kgneg/synthetic.hpp"
#include "kgneg/trainer.hpp"
#include "kgneg/triple_store.hpp"
#include "kgneg/type_catalog.hpp"
