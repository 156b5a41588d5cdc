#include <cstdlib>
#include <string_view>

#include "pcm/simd.hpp"

namespace pcm::simd {

PointsSoA::PointsSoA(std::span<const Vec3f> points) {
  x_.reserve(points.size());
  y_.reserve(points.size());
  z_.reserve(points.size());
  for (const auto& p : points) {
    x_.push_back(p.x);
    y_.push_back(p.y);
    z_.push_back(p.z);
  }
}

const KernelTable* avx2_kernels() noexcept {
#if defined(PCM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable& select() noexcept {
  const char* env = std::getenv("PCM_SIMD");
  const std::string_view want = env ? env : "";
  if (want == "scalar") return scalar_kernels();
  if (const auto* t = avx2_kernels()) return *t;
  return scalar_kernels();
}

}  // namespace

const KernelTable& kernels() noexcept {
  static const KernelTable& active = select();
  return active;
}

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
  if (const auto* t = avx2_kernels()) out.push_back(t);
  return out;
}

}  // namespace pcm::simd
