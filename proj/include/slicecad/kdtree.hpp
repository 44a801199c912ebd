// Copyright 2026 The slicecad Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

namespace slicecad {

/// Static k-d tree over a fixed point set, answering exact nearest-neighbour
/// queries. Squared distances are accumulated in coordinate order so results
/// compare bit-for-bit with a brute-force scan.
template <int Dim>
class KdTree {
 public:
  using Point = std::array<double, Dim>;

  explicit KdTree(std::vector<Point> points) : points_(std::move(points)), index_(points_.size()) {
    std::iota(index_.begin(), index_.end(), 0u);
    if (!points_.empty()) root_ = build(0, index_.size(), 0);
  }

  bool empty() const { return points_.empty(); }

  struct Hit {
    std::uint32_t index = 0;
    double dist2 = INFINITY;
  };

  Hit nearest(const Point& q) const {
    Hit best;
    if (root_ >= 0) search(root_, q, best);
    return best;
  }

  static double dist2(const Point& a, const Point& b) {
    double s = 0.0;
    for (int d = 0; d < Dim; ++d) {
      const double t = a[d] - b[d];
      s += t * t;
    }
    return s;
  }

 private:
  struct Node {
    std::uint32_t point;
    int axis;
    int left = -1;
    int right = -1;
  };

  int build(std::size_t lo, std::size_t hi, int depth) {
    if (lo >= hi) return -1;
    const int axis = depth % Dim;
    const std::size_t mid = (lo + hi) / 2;
    std::nth_element(index_.begin() + lo, index_.begin() + mid, index_.begin() + hi,
                     [&](std::uint32_t a, std::uint32_t b) {
                       if (points_[a][axis] != points_[b][axis]) return points_[a][axis] < points_[b][axis];
                       return a < b;
                     });
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({index_[mid], axis});
    const int l = build(lo, mid, depth + 1);
    const int r = build(mid + 1, hi, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  void search(int id, const Point& q, Hit& best) const {
    const Node& n = nodes_[id];
    const Point& p = points_[n.point];
    const double d2 = dist2(q, p);
    if (d2 < best.dist2 || (d2 == best.dist2 && n.point < best.index)) best = {n.point, d2};
    const double diff = q[n.axis] - p[n.axis];
    const int near = diff < 0 ? n.left : n.right;
    const int far = diff < 0 ? n.right : n.left;
    if (near >= 0) search(near, q, best);
    if (far >= 0 && diff * diff <= best.dist2) search(far, q, best);
  }

  std::vector<Point> points_;
  std::vector<std::uint32_t> index_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

/// Mean over `from` of the squared distance to the nearest point of `to`.
template <int Dim>
double mean_nearest_sq(std::span<const std::array<double, Dim>> from, const KdTree<Dim>& to) {
  double s = 0.0;
  for (const auto& q : from) s += to.nearest(q).dist2;
  return s / static_cast<double>(from.size());
}

}  // namespace slicecad
