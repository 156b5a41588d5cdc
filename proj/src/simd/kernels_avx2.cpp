// AVX2 variants, 4 double lanes. Compiled with function-level target
// attributes so no AVX2 code leaks into inline functions shared with the
// rest of the program.

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "pcm/simd.hpp"

#define PCM_AVX2 __attribute__((target("avx2")))

namespace pcm::simd {
namespace {

constexpr std::size_t kLanes = 4;

PCM_AVX2 inline __m256d sq_dist4(PointsView p, std::size_t j, __m256d qx, __m256d qy, __m256d qz) {
  const __m256d dx = _mm256_sub_pd(_mm256_cvtps_pd(_mm_loadu_ps(p.x + j)), qx);
  const __m256d dy = _mm256_sub_pd(_mm256_cvtps_pd(_mm_loadu_ps(p.y + j)), qy);
  const __m256d dz = _mm256_sub_pd(_mm256_cvtps_pd(_mm_loadu_ps(p.z + j)), qz);
  return _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)), _mm256_mul_pd(dz, dz));
}

inline double sq_dist1(PointsView p, Query q, std::size_t j) {
  const double dx = static_cast<double>(p.x[j]) - q.x;
  const double dy = static_cast<double>(p.y[j]) - q.y;
  const double dz = static_cast<double>(p.z[j]) - q.z;
  return dx * dx + dy * dy + dz * dz;
}

PCM_AVX2 void squared_distances(PointsView pts, Query q, double* out) {
  const __m256d qx = _mm256_set1_pd(q.x), qy = _mm256_set1_pd(q.y), qz = _mm256_set1_pd(q.z);
  std::size_t j = 0;
  for (; j + kLanes <= pts.size; j += kLanes) _mm256_storeu_pd(out + j, sq_dist4(pts, j, qx, qy, qz));
  for (; j < pts.size; ++j) out[j] = sq_dist1(pts, q, j);
}

PCM_AVX2 void distances(PointsView pts, Query q, double* out) {
  const __m256d qx = _mm256_set1_pd(q.x), qy = _mm256_set1_pd(q.y), qz = _mm256_set1_pd(q.z);
  std::size_t j = 0;
  for (; j + kLanes <= pts.size; j += kLanes)
    _mm256_storeu_pd(out + j, _mm256_sqrt_pd(sq_dist4(pts, j, qx, qy, qz)));
  for (; j < pts.size; ++j) out[j] = std::sqrt(sq_dist1(pts, q, j));
}

PCM_AVX2 std::size_t fps_update(PointsView pts, Query q, double* min_sq) {
  const __m256d qx = _mm256_set1_pd(q.x), qy = _mm256_set1_pd(q.y), qz = _mm256_set1_pd(q.z);
  double best = -1.0;
  std::size_t arg = 0;
  std::size_t j = 0;
  if (pts.size >= kLanes) {
    __m256d vbest = _mm256_set1_pd(-1.0);
    __m256d varg = _mm256_setzero_pd();
    __m256d vidx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    const __m256d step = _mm256_set1_pd(static_cast<double>(kLanes));
    for (; j + kLanes <= pts.size; j += kLanes) {
      const __m256d d = sq_dist4(pts, j, qx, qy, qz);
      const __m256d m = _mm256_min_pd(d, _mm256_loadu_pd(min_sq + j));
      _mm256_storeu_pd(min_sq + j, m);
      const __m256d gt = _mm256_cmp_pd(m, vbest, _CMP_GT_OQ);
      vbest = _mm256_blendv_pd(vbest, m, gt);
      varg = _mm256_blendv_pd(varg, vidx, gt);
      vidx = _mm256_add_pd(vidx, step);
    }
    alignas(32) double lb[kLanes], la[kLanes];
    _mm256_store_pd(lb, vbest);
    _mm256_store_pd(la, varg);
    for (std::size_t l = 0; l < kLanes; ++l) {
      const auto idx = static_cast<std::size_t>(la[l]);
      if (lb[l] > best || (lb[l] == best && idx < arg)) {
        best = lb[l];
        arg = idx;
      }
    }
  }
  for (; j < pts.size; ++j) {
    const double d = sq_dist1(pts, q, j);
    if (d < min_sq[j]) min_sq[j] = d;
    if (min_sq[j] > best) {
      best = min_sq[j];
      arg = j;
    }
  }
  return arg;
}

PCM_AVX2 BestTwo best_two(const double* benefit, const double* price, std::size_t n) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  BestTwo r{kNegInf, kNegInf, 0};
  std::size_t j = 0;
  if (n >= kLanes) {
    __m256d vbest = _mm256_set1_pd(kNegInf);
    __m256d vsecond = vbest;
    __m256d varg = _mm256_setzero_pd();
    __m256d vidx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    const __m256d step = _mm256_set1_pd(static_cast<double>(kLanes));
    for (; j + kLanes <= n; j += kLanes) {
      const __m256d v = _mm256_sub_pd(_mm256_loadu_pd(benefit + j), _mm256_loadu_pd(price + j));
      const __m256d gt = _mm256_cmp_pd(v, vbest, _CMP_GT_OQ);
      // Not a new best: v <= best, so the runner-up is max(second, v).
      const __m256d keep_second = _mm256_max_pd(v, vsecond);
      vsecond = _mm256_blendv_pd(keep_second, vbest, gt);
      vbest = _mm256_blendv_pd(vbest, v, gt);
      varg = _mm256_blendv_pd(varg, vidx, gt);
      vidx = _mm256_add_pd(vidx, step);
    }
    alignas(32) double lb[kLanes], ls[kLanes], la[kLanes];
    _mm256_store_pd(lb, vbest);
    _mm256_store_pd(ls, vsecond);
    _mm256_store_pd(la, varg);
    std::size_t win = 0;
    for (std::size_t l = 1; l < kLanes; ++l)
      if (lb[l] > lb[win] || (lb[l] == lb[win] && la[l] < la[win])) win = l;
    r.best = lb[win];
    r.index = static_cast<std::uint32_t>(la[win]);
    r.second = ls[win];
    for (std::size_t l = 0; l < kLanes; ++l)
      if (l != win && lb[l] > r.second) r.second = lb[l];
  }
  for (; j < n; ++j) {
    const double v = benefit[j] - price[j];
    if (v > r.best) {
      r.second = r.best;
      r.best = v;
      r.index = static_cast<std::uint32_t>(j);
    } else if (v > r.second) {
      r.second = v;
    }
  }
  return r;
}

}  // namespace

namespace detail {

const KernelTable& avx2_table() noexcept {
  static const KernelTable table{"avx2", &squared_distances, &distances, &fps_update, &best_two};
  return table;
}

}  // namespace detail
}  // namespace pcm::simd
