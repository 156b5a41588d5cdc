#include <cmath>
#include <limits>

#include "pcm/simd.hpp"

namespace pcm::simd {
namespace {

inline double sq_dist(PointsView p, Query q, std::size_t j) {
  const double dx = static_cast<double>(p.x[j]) - q.x;
  const double dy = static_cast<double>(p.y[j]) - q.y;
  const double dz = static_cast<double>(p.z[j]) - q.z;
  return dx * dx + dy * dy + dz * dz;
}

void squared_distances(PointsView pts, Query q, double* out) {
  for (std::size_t j = 0; j < pts.size; ++j) out[j] = sq_dist(pts, q, j);
}

void distances(PointsView pts, Query q, double* out) {
  for (std::size_t j = 0; j < pts.size; ++j) out[j] = std::sqrt(sq_dist(pts, q, j));
}

std::size_t fps_update(PointsView pts, Query q, double* min_sq) {
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t j = 0; j < pts.size; ++j) {
    const double d = sq_dist(pts, q, j);
    if (d < min_sq[j]) min_sq[j] = d;
    if (min_sq[j] > best) {
      best = min_sq[j];
      arg = j;
    }
  }
  return arg;
}

BestTwo best_two(const double* benefit, const double* price, std::size_t n) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  BestTwo r{kNegInf, kNegInf, 0};
  for (std::size_t j = 0; j < n; ++j) {
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

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{"scalar", &squared_distances, &distances, &fps_update, &best_two};
  return table;
}

}  // namespace pcm::simd
