#pragma once

// Data-parallel inner loops shared by the solvers, the kd-tree and the
// samplers. Every kernel has a scalar reference; vector variants are chosen
// once at runtime and must reproduce the scalar results bit for bit
// (no FMA contraction, correctly rounded sqrt, identical reduction order for
// the index-returning reductions).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pcm/types.hpp"

namespace pcm::simd {

// Structure-of-arrays view of a point set.
struct PointsView {
  const float* x = nullptr;
  const float* y = nullptr;
  const float* z = nullptr;
  std::size_t size = 0;
};

// Owning SoA copy of a cloud (or a subset of it).
class PointsSoA {
 public:
  PointsSoA() = default;
  explicit PointsSoA(std::span<const Vec3f> points);

  PointsView view() const noexcept { return {x_.data(), y_.data(), z_.data(), x_.size()}; }
  PointsView view(std::size_t first, std::size_t count) const noexcept {
    return {x_.data() + first, y_.data() + first, z_.data() + first, count};
  }
  std::size_t size() const noexcept { return x_.size(); }

 private:
  std::vector<float> x_, y_, z_;
};

struct Query {
  double x, y, z;
  static Query from(const Vec3f& p) noexcept { return {p.x, p.y, p.z}; }
};

// Largest and second-largest of benefit[j] - price[j]. `index` is the
// smallest j attaining `best`; `second` equals `best` when the maximum is
// attained twice. With n == 1, second is -inf.
struct BestTwo {
  double best;
  double second;
  std::uint32_t index;
};

struct KernelTable {
  std::string_view name;
  // out[j] = |p_j - q|^2
  void (*squared_distances)(PointsView pts, Query q, double* out);
  // out[j] = |p_j - q|
  void (*distances)(PointsView pts, Query q, double* out);
  // min_sq[j] = min(min_sq[j], |p_j - q|^2); returns the smallest j holding
  // the largest updated value. Requires pts.size >= 1.
  std::size_t (*fps_update)(PointsView pts, Query q, double* min_sq);
  // Requires n >= 1.
  BestTwo (*best_two)(const double* benefit, const double* price, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_kernels() noexcept;

// The table every library routine uses. Picks the widest supported variant
// on first use; PCM_SIMD=scalar|avx2 in the environment overrides.
const KernelTable& kernels() noexcept;

// Every variant usable on this machine, scalar first.
std::vector<const KernelTable*> available_kernels();

namespace detail {
#ifdef PCM_HAVE_AVX2
const KernelTable& avx2_table() noexcept;
#endif
}  // namespace detail

}  // namespace pcm::simd
