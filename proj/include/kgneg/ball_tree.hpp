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
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "kgneg/error.hpp"

namespace kgneg {

// Exact k-nearest-neighbour search under Euclidean distance. Nodes are
// hyperspheres (centroid + covering radius) split at the median of the
// widest coordinate. Results are ordered by (squared distance, id), so ties
// resolve towards the smaller id.
template <typename Scalar = double>
class BallTree {
 public:
  struct Neighbor {
    std::uint32_t id;
    Scalar dist2;

    friend bool operator<(const Neighbor& a, const Neighbor& b) {
      return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.id < b.id);
    }
  };

  BallTree() = default;

  // data is row-major, one row of `dim` values per id.
  BallTree(std::vector<Scalar> data, std::vector<std::uint32_t> ids, std::size_t dim, std::size_t leaf_size = 32)
      : data_(std::move(data)), ids_(std::move(ids)), dim_(dim), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
    if (ids_.empty()) throw Error("ball tree needs at least one point");
    if (dim_ == 0 || data_.size() != ids_.size() * dim_) throw Error("ball tree: dimension mismatch");
    order_.resize(ids_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    build(0, order_.size());
  }

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  std::size_t leaf_size() const { return leaf_size_; }
  std::size_t num_nodes() const { return nodes_.size(); }

  std::span<const Scalar> point(std::size_t row) const { return {data_.data() + row * dim_, dim_}; }
  std::uint32_t id(std::size_t row) const { return ids_[row]; }

  std::vector<Neighbor> query(std::span<const Scalar> q, std::size_t k) const {
    return query(q, k, [](std::uint32_t) { return true; });
  }

  // k nearest points whose id passes `accept`.
  template <typename Accept>
  std::vector<Neighbor> query(std::span<const Scalar> q, std::size_t k, Accept&& accept) const {
    if (q.size() != dim_) throw Error("ball tree query: dimension mismatch");
    std::priority_queue<Neighbor> heap;  // max-heap on (dist2, id)
    if (k > 0) search(0, q, k, accept, heap);
    std::vector<Neighbor> out;
    out.reserve(heap.size());
    while (!heap.empty()) {
      out.push_back(heap.top());
      heap.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  static Scalar squared_distance(std::span<const Scalar> a, std::span<const Scalar> b) {
    Scalar acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const Scalar diff = a[i] - b[i];
      acc += diff * diff;
    }
    return acc;
  }

 private:
  struct Node {
    std::size_t begin;
    std::size_t end;
    std::size_t left = kNone;
    std::size_t right = kNone;
    Scalar radius = 0;
  };
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::span<const Scalar> center(std::size_t node) const { return {centers_.data() + node * dim_, dim_}; }

  std::size_t build(std::size_t begin, std::size_t end) {
    const std::size_t node = nodes_.size();
    nodes_.push_back({begin, end});
    centers_.resize(centers_.size() + dim_, Scalar{0});

    std::vector<Scalar> c(dim_, Scalar{0});
    for (std::size_t i = begin; i < end; ++i) {
      const auto p = point(order_[i]);
      for (std::size_t j = 0; j < dim_; ++j) c[j] += p[j];
    }
    const Scalar n = static_cast<Scalar>(end - begin);
    for (auto& x : c) x /= n;
    Scalar radius = 0;
    for (std::size_t i = begin; i < end; ++i) radius = std::max(radius, std::sqrt(squared_distance(point(order_[i]), c)));
    std::copy(c.begin(), c.end(), centers_.begin() + static_cast<std::ptrdiff_t>(node * dim_));
    nodes_[node].radius = radius;

    if (end - begin <= leaf_size_) return node;

    std::size_t split_dim = 0;
    Scalar best_spread = -1;
    for (std::size_t j = 0; j < dim_; ++j) {
      Scalar lo = std::numeric_limits<Scalar>::max();
      Scalar hi = std::numeric_limits<Scalar>::lowest();
      for (std::size_t i = begin; i < end; ++i) {
        const Scalar v = data_[order_[i] * dim_ + j];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > best_spread) {
        best_spread = hi - lo;
        split_dim = j;
      }
    }
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin), order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                       const Scalar va = data_[a * dim_ + split_dim];
                       const Scalar vb = data_[b * dim_ + split_dim];
                       return va < vb || (va == vb && a < b);
                     });
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    nodes_[node].left = left;
    nodes_[node].right = right;
    return node;
  }

  // Lower bound on the distance from q to any point in the node.
  Scalar lower_bound(std::size_t node, std::span<const Scalar> q) const {
    const Scalar dc = std::sqrt(squared_distance(q, center(node)));
    return std::max(Scalar{0}, dc - nodes_[node].radius);
  }

  template <typename Accept>
  void search(std::size_t node, std::span<const Scalar> q, std::size_t k, Accept& accept,
              std::priority_queue<Neighbor>& heap) const {
    const Node& nd = nodes_[node];
    if (heap.size() == k) {
      // Slack absorbs rounding in the sqrt-based bound so equal-distance ties are never pruned.
      const Scalar worst = std::sqrt(heap.top().dist2);
      if (lower_bound(node, q) > worst * (1 + Scalar(1e-9)) + std::numeric_limits<Scalar>::min()) return;
    }
    if (nd.left == kNone) {
      for (std::size_t i = nd.begin; i < nd.end; ++i) {
        const std::size_t row = order_[i];
        const std::uint32_t pid = ids_[row];
        if (!accept(pid)) continue;
        Neighbor cand{pid, squared_distance(q, point(row))};
        if (heap.size() < k) {
          heap.push(cand);
        } else if (cand < heap.top()) {
          heap.pop();
          heap.push(cand);
        }
      }
      return;
    }
    const Scalar dl = squared_distance(q, center(nd.left));
    const Scalar dr = squared_distance(q, center(nd.right));
    if (dl <= dr) {
      search(nd.left, q, k, accept, heap);
      search(nd.right, q, k, accept, heap);
    } else {
      search(nd.right, q, k, accept, heap);
      search(nd.left, q, k, accept, heap);
    }
  }

  std::vector<Scalar> data_;
  std::vector<std::uint32_t> ids_;
  std::size_t dim_ = 0;
  std::size_t leaf_size_ = 32;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  std::vector<Scalar> centers_;
};

using KnnIndex = BallTree<double>;

struct IndexedPoint {
  std::uint32_t id;
  std::vector<double> vector;
};

inline KnnIndex build_knn_index(const std::vector<IndexedPoint>& points, std::size_t leaf_size = 32) {
  if (points.empty()) throw Error("build_knn_index: no points");
  const std::size_t dim = points.front().vector.size();
  std::vector<double> data;
  std::vector<std::uint32_t> ids;
  data.reserve(points.size() * dim);
  for (const auto& p : points) {
    if (p.vector.size() != dim) throw Error("build_knn_index: dimension mismatch");
    data.insert(data.end(), p.vector.begin(), p.vector.end());
    ids.push_back(p.id);
  }
  return KnnIndex(std::move(data), std::move(ids), dim, leaf_size);
}

}  // namespace kgneg
