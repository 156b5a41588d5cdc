#pragma once

#include <cstdint>
#include <random>

namespace pcm {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;
// Order-sensitive combination used to derive independent per-task streams.
std::uint64_t mix64(std::uint64_t a, std::uint64_t b) noexcept;
std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept;

// Seedable deterministic stream. Every stochastic choice in the library draws
// from an explicitly passed RngStream; none of the draws go through
// implementation-defined std:: distributions, so sequences are identical
// across standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on {0, ..., n-1}; n >= 1. Unbiased (rejection).
  std::uint64_t uniform_index(std::uint64_t n);
  double exponential();
  double normal();
  double gamma(double shape);

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace pcm
