#include "pcm/neighbors.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <string>

#include "pcm/error.hpp"

namespace pcm {
namespace {

double coord(const Vec3f& p, int axis) {
  return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
}

struct Candidate {
  double sq;
  std::int64_t rank;  // original index, or -1 for the prioritised centre
  std::uint32_t index;
};

bool closer(const Candidate& a, const Candidate& b) {
  return a.sq < b.sq || (a.sq == b.sq && a.rank < b.rank);
}

}  // namespace

SpatialIndex::SpatialIndex(const PointCloud& cloud) : original_(cloud.points().begin(), cloud.points().end()) {
  require_valid(cloud);
  order_.resize(cloud.size());
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * (cloud.size() / kLeafSize + 1));
  build(0, static_cast<std::uint32_t>(cloud.size()), cloud);
  std::vector<Vec3f> reordered;
  reordered.reserve(cloud.size());
  for (auto i : order_) reordered.push_back(cloud[i]);
  points_ = simd::PointsSoA(reordered);
}

std::int32_t SpatialIndex::build(std::uint32_t begin, std::uint32_t end, const PointCloud& cloud) {
  Node node;
  for (int a = 0; a < 3; ++a) {
    node.lo[a] = coord(cloud[order_[begin]], a);
    node.hi[a] = node.lo[a];
  }
  for (auto t = begin; t < end; ++t) {
    for (int a = 0; a < 3; ++a) {
      const double c = coord(cloud[order_[t]], a);
      node.lo[a] = std::min(node.lo[a], c);
      node.hi[a] = std::max(node.hi[a], c);
    }
  }
  node.begin = begin;
  node.end = end;
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return id;

  int axis = 0;
  for (int a = 1; a < 3; ++a)
    if (node.hi[a] - node.lo[a] > node.hi[axis] - node.lo[axis]) axis = a;
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t l, std::uint32_t r) {
                     const double cl = coord(cloud[l], axis), cr = coord(cloud[r], axis);
                     return cl < cr || (cl == cr && l < r);
                   });
  const auto left = build(begin, mid, cloud);
  const auto right = build(mid, end, cloud);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<std::uint32_t> SpatialIndex::search(simd::Query q, std::size_t k, std::int64_t priority_index) const {
  if (k < 1 || k > size())
    throw InputError("knn: k = " + std::to_string(k) + " out of range [1, " + std::to_string(size()) + "]");

  // Max-heap on (sq, rank): front is the current worst of the best k.
  std::vector<Candidate> heap;
  heap.reserve(k + 1);
  const auto& kern = simd::kernels();
  std::array<double, kLeafSize> sq{};

  auto box_sq = [&](const Node& n) {
    const double qc[3] = {q.x, q.y, q.z};
    double d = 0.0;
    for (int a = 0; a < 3; ++a) {
      double t = 0.0;
      if (qc[a] < n.lo[a]) t = n.lo[a] - qc[a];
      else if (qc[a] > n.hi[a]) t = qc[a] - n.hi[a];
      d += t * t;
    }
    return d;
  };

  auto visit = [&](auto&& self, std::int32_t id) -> void {
    const Node& n = nodes_[id];
    if (heap.size() == k && box_sq(n) > heap.front().sq) return;
    if (n.left < 0) {
      const std::size_t count = n.end - n.begin;
      kern.squared_distances(points_.view(n.begin, count), q, sq.data());
      for (std::size_t t = 0; t < count; ++t) {
        const std::uint32_t idx = order_[n.begin + t];
        const Candidate c{sq[t], idx == priority_index ? -1 : static_cast<std::int64_t>(idx), idx};
        if (heap.size() < k) {
          heap.push_back(c);
          std::push_heap(heap.begin(), heap.end(), closer);
        } else if (closer(c, heap.front())) {
          std::pop_heap(heap.begin(), heap.end(), closer);
          heap.back() = c;
          std::push_heap(heap.begin(), heap.end(), closer);
        }
      }
      return;
    }
    const Node& l = nodes_[n.left];
    const Node& r = nodes_[n.right];
    if (box_sq(l) <= box_sq(r)) {
      self(self, n.left);
      self(self, n.right);
    } else {
      self(self, n.right);
      self(self, n.left);
    }
  };
  visit(visit, 0);

  std::sort_heap(heap.begin(), heap.end(), closer);
  std::vector<std::uint32_t> out;
  out.reserve(k);
  for (const auto& c : heap) out.push_back(c.index);
  return out;
}

std::vector<std::uint32_t> SpatialIndex::knn(std::uint32_t center_index, std::size_t k) const {
  if (center_index >= size()) throw InputError("knn: center index out of range");
  return search(simd::Query::from(original_[center_index]), k, center_index);
}

std::vector<std::uint32_t> SpatialIndex::nearest(const Vec3f& query, std::size_t k) const {
  return search(simd::Query::from(query), k, -1);
}

}  // namespace pcm
