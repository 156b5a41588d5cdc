#pragma once

// Independent reference implementations used as test oracles. Nothing here
// calls into the solver, kd-tree or sampler code paths it checks.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pcm/ingest.hpp"
#include "pcm/rng.hpp"
#include "pcm/types.hpp"

namespace pcm::testing {

inline PointCloud random_cloud(std::mt19937_64& gen, std::size_t n, float scale = 1.0f) {
  std::uniform_real_distribution<float> u(-scale, scale);
  std::vector<Vec3f> pts(n);
  for (auto& p : pts) p = {u(gen), u(gen), u(gen)};
  return PointCloud(std::move(pts));
}

// Plain long-double Euclidean distance, independent of the library helpers.
inline long double ref_distance(const Vec3f& a, const Vec3f& b) {
  const long double dx = static_cast<long double>(a.x) - b.x;
  const long double dy = static_cast<long double>(a.y) - b.y;
  const long double dz = static_cast<long double>(a.z) - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double ref_sq(const Vec3f& a, const Vec3f& b) {
  const double dx = static_cast<double>(a.x) - b.x;
  const double dy = static_cast<double>(a.y) - b.y;
  const double dz = static_cast<double>(a.z) - b.z;
  return dx * dx + dy * dy + dz * dz;
}

struct BruteAssignment {
  long double cost;
  std::vector<std::uint32_t> mapping;  // lexicographically smallest optimum
};

// Exhaustive minimum over all N! permutations.
inline BruteAssignment brute_force_assignment(const PointCloud& a, const PointCloud& b) {
  const std::size_t n = a.size();
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  BruteAssignment best{-1, perm};
  do {
    long double c = 0;
    for (std::size_t i = 0; i < n; ++i) c += ref_distance(a[i], b[perm[i]]);
    // Lex order enumeration: only a strictly better cost replaces the
    // incumbent, so the first optimum found is kept.
    if (best.cost < 0 || c < best.cost - 1e-12L * std::max<long double>(1, best.cost)) best = {c, perm};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Linear-scan k nearest of cloud[center], centre first, then (sq, index).
inline std::vector<std::uint32_t> brute_knn(const PointCloud& cloud, std::uint32_t center, std::size_t k) {
  std::vector<std::pair<double, std::uint32_t>> all;
  for (std::uint32_t i = 0; i < cloud.size(); ++i)
    if (i != center) all.emplace_back(ref_sq(cloud[center], cloud[i]), i);
  std::sort(all.begin(), all.end());
  std::vector<std::uint32_t> out{center};
  for (std::size_t t = 0; out.size() < k; ++t) out.push_back(all[t].second);
  return out;
}

inline std::vector<std::uint32_t> brute_nearest(const PointCloud& cloud, const Vec3f& q, std::size_t k) {
  std::vector<std::pair<double, std::uint32_t>> all;
  for (std::uint32_t i = 0; i < cloud.size(); ++i) all.emplace_back(ref_sq(q, cloud[i]), i);
  std::sort(all.begin(), all.end());
  std::vector<std::uint32_t> out;
  for (std::size_t t = 0; t < k; ++t) out.push_back(all[t].second);
  return out;
}

// O(N^2) per step greedy farthest point sampling.
inline std::vector<std::uint32_t> brute_fps(const PointCloud& cloud, std::size_t n, std::uint32_t start) {
  std::vector<std::uint32_t> picked{start};
  std::vector<bool> taken(cloud.size(), false);
  taken[start] = true;
  while (picked.size() < n) {
    double best = -1;
    std::uint32_t arg = 0;
    for (std::uint32_t i = 0; i < cloud.size(); ++i) {
      if (taken[i]) continue;
      double m = std::numeric_limits<double>::infinity();
      for (auto p : picked) m = std::min(m, ref_sq(cloud[i], cloud[p]));
      if (m > best) {
        best = m;
        arg = i;
      }
    }
    picked.push_back(arg);
    taken[arg] = true;
  }
  return picked;
}

// Kolmogorov-Smirnov statistic of samples against U[0, 1].
inline double ks_uniform(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = std::clamp(xs[i], 0.0, 1.0);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

// Asymptotic 1% critical value of the one-sample KS statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

inline bool is_sorted_permutation(std::vector<std::uint32_t> m) {
  std::sort(m.begin(), m.end());
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] != i) return false;
  return true;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("pcm_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

// Writes a class-per-folder dataset of random PLY clouds with per-point labels
// and saliency, returning the root.
inline std::filesystem::path make_dataset(const std::string& name, std::size_t classes, std::size_t per_class,
                                          std::size_t points, std::uint64_t seed) {
  const auto root = temp_dir(name);
  std::mt19937_64 gen(seed);
  for (std::size_t c = 0; c < classes; ++c) {
    const auto dir = root / ("class" + std::to_string(c));
    std::filesystem::create_directories(dir);
    for (std::size_t f = 0; f < per_class; ++f) {
      const auto cloud = random_cloud(gen, points + gen() % 64, 1.0f + c);
      PartLabels parts;
      SaliencyWeights sal;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        parts.labels.push_back(static_cast<std::int32_t>(c * 10 + i % 4));
        sal.values.push_back(static_cast<float>(gen() % 100) / 10.0f);
      }
      char file[32];
      std::snprintf(file, sizeof file, "s%03zu.ply", f);
      write_text_file(dir / file, write_ply(cloud, &parts, &sal));
    }
  }
  return root;
}

}  // namespace pcm::testing
