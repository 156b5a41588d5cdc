#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pcm/simd.hpp"
#include "pcm/types.hpp"

namespace pcm {

// Median-split kd-tree (widest axis, leaf size 16) over a cloud, answering
// exact k-nearest-neighbour queries. Results are ordered by
// (squared distance, original index), so they match a linear scan regardless
// of tree layout. Immutable after construction.
class SpatialIndex {
 public:
  static constexpr std::size_t kLeafSize = 16;

  explicit SpatialIndex(const PointCloud& cloud);

  std::size_t size() const noexcept { return order_.size(); }

  // The k points nearest to cloud[center_index]. The centre itself is always
  // element 0, even when duplicates of it have smaller indices; the other
  // k - 1 follow by (distance, index). Requires 1 <= k <= N.
  std::vector<std::uint32_t> knn(std::uint32_t center_index, std::size_t k) const;

  // The k points nearest to an arbitrary query, by (distance, index).
  std::vector<std::uint32_t> nearest(const Vec3f& query, std::size_t k) const;

 private:
  struct Node {
    double lo[3];
    double hi[3];
    std::uint32_t begin = 0;  // range in order_
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end, const PointCloud& cloud);
  std::vector<std::uint32_t> search(simd::Query q, std::size_t k, std::int64_t priority_index) const;

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;  // tree position -> original index
  simd::PointsSoA points_;            // points in tree order
  std::vector<Vec3f> original_;
};

inline SpatialIndex build_index(const PointCloud& cloud) { return SpatialIndex(cloud); }

inline std::vector<std::uint32_t> knn(const SpatialIndex& index, std::uint32_t center_index, std::size_t k) {
  return index.knn(center_index, k);
}

}  // namespace pcm
