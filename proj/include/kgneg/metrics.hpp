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
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "kgneg/error.hpp"

namespace kgneg {

// kStrict counts rank < K, kInclusive counts rank <= K.
enum class HitsComparator : std::uint8_t { kStrict, kInclusive };

inline const char* comparator_name(HitsComparator c) { return c == HitsComparator::kStrict ? "strict" : "inclusive"; }

inline std::optional<HitsComparator> parse_comparator(std::string_view name) {
  if (name == "strict") return HitsComparator::kStrict;
  if (name == "inclusive") return HitsComparator::kInclusive;
  return std::nullopt;
}

// 1 + (candidates scoring above) + (candidates tying). Ties count against the
// positive.
inline std::size_t rank_from_scores(double positive, std::span<const double> candidates) {
  std::size_t rank = 1;
  for (double c : candidates) {
    if (c >= positive) ++rank;
  }
  return rank;
}

inline double mrr(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw Error("mrr: empty rank list");
  double total = 0.0;
  for (std::size_t r : ranks) {
    if (r == 0) throw Error("mrr: ranks start at 1");
    total += 1.0 / static_cast<double>(r);
  }
  return total / static_cast<double>(ranks.size());
}

inline double hits_at_k(std::span<const std::size_t> ranks, std::size_t k,
                        HitsComparator comparator = HitsComparator::kInclusive) {
  if (k == 0) throw Error("hits_at_k: K must be at least 1");
  if (ranks.empty()) throw Error("hits_at_k: empty rank list");
  std::size_t hit = 0;
  for (std::size_t r : ranks) {
    if (comparator == HitsComparator::kStrict ? r < k : r <= k) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(ranks.size());
}

}  // namespace kgneg
