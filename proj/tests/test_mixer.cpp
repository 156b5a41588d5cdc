#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "pcm/error.hpp"
#include "pcm/mixer.hpp"
#include "test_support.hpp"

using namespace pcm;
using pcm::testing::random_cloud;

TEST_CASE("sample_lambda with beta = 1 is uniform") {
  RngStream rng(31);
  const int n = 100000;
  std::vector<double> xs(n);
  double s = 0, s2 = 0;
  for (auto& x : xs) {
    x = sample_lambda(1.0, rng);
    REQUIRE(x >= 0.0);
    REQUIRE(x <= 1.0);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  CHECK(std::abs(mean - 0.5) < 0.01);
  CHECK(std::abs(var - 1.0 / 12) < 0.005);
  xs.resize(10000);
  CHECK(testing::ks_uniform(xs) < testing::ks_critical_1pct(xs.size()));
}

TEST_CASE("sample_lambda Beta(b, b) moments") {
  for (double beta : {0.3, 2.0, 5.0}) {
    RngStream rng(32);
    const int n = 100000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double x = sample_lambda(beta, rng);
      s += x;
      s2 += x * x;
    }
    const double mean = s / n, var = s2 / n - mean * mean;
    CAPTURE(beta);
    CHECK(std::abs(mean - 0.5) < 0.01);
    CHECK(var == doctest::Approx(1.0 / (4 * (2 * beta + 1))).epsilon(0.05));
  }
}

TEST_CASE("sample_lambda determinism and errors") {
  for (double beta : {0.5, 1.0, 3.0}) {
    RngStream a(33), b(33);
    for (int i = 0; i < 100; ++i) CHECK(sample_lambda(beta, a) == sample_lambda(beta, b));
  }
  RngStream r(1);
  CHECK_THROWS_AS(sample_lambda(0.0, r), InputError);
  CHECK_THROWS_AS(sample_lambda(-2.0, r), InputError);
}

TEST_CASE("kept_count floors") {
  CHECK(kept_count(0.0, 1024) == 0);
  CHECK(kept_count(1.0, 1024) == 1024);
  CHECK(kept_count(0.2, 1024) == 204);
  CHECK(kept_count(0.999, 10) == 9);
  CHECK_THROWS_AS(kept_count(1.5, 10), InputError);
}

TEST_CASE("mask_random") {
  RngStream rng(34);
  CHECK(mask_random(4, 4, rng) == ReplacementMask::all_ones(4));
  CHECK(mask_random(4, 0, rng) == ReplacementMask::all_zeros(4));
  CHECK_THROWS_AS(mask_random(4, 5, rng), InputError);

  std::vector<int> kept(100, 0);
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    const auto m = mask_random(100, 30, rng);
    REQUIRE(m.n_kept() == 30);
    for (int i = 0; i < 100; ++i) kept[i] += m.kept(i);
  }
  for (int i = 0; i < 100; ++i) CHECK(std::abs(kept[i] / double(trials) - 0.30) < 0.01);
}

TEST_CASE("mask_knn") {
  std::mt19937_64 gen(35);
  const auto cloud = random_cloud(gen, 64);
  const SpatialIndex idx(cloud);
  CHECK(mask_knn(cloud, 64, 13, idx) == ReplacementMask::all_ones(64));
  const auto one = mask_knn(cloud, 1, 13, idx);
  CHECK(one.n_kept() == 1);
  CHECK(one.kept(13));
  const auto m = mask_knn(cloud, 20, 5, idx);
  CHECK(m == ReplacementMask::from_indices(64, testing::brute_knn(cloud, 5, 20)));
  CHECK_THROWS_AS(mask_knn(cloud, 0, 5, idx), InputError);
  CHECK_THROWS_AS(mask_knn(cloud, 3, 64, idx), InputError);
}

TEST_CASE("choose_center_saliency law") {
  auto freqs = [](std::vector<float> w, int draws) {
    RngStream rng(36);
    SaliencyWeights sw{std::move(w)};
    std::vector<double> f(sw.size(), 0);
    for (int i = 0; i < draws; ++i) f[choose_center_saliency(sw, rng)] += 1.0 / draws;
    return f;
  };
  const int n = 100000;
  const auto uniform = freqs(std::vector<float>(10, 2.5f), n);
  const double sigma = std::sqrt(0.1 * 0.9 / n);
  for (double f : uniform) CHECK(std::abs(f - 0.1) < 3 * sigma + 1e-12);
  CHECK(freqs({0, 0, 1}, n)[2] > 1 - 1e-3);
  const auto lin = freqs({1, 2, 3}, n);
  CHECK(std::abs(lin[0]) < 0.01);
  CHECK(std::abs(lin[1] - 1.0 / 3) < 0.01);
  CHECK(std::abs(lin[2] - 2.0 / 3) < 0.01);
  // Shift invariance: negative scores behave like their shifted copies.
  CHECK(freqs({-7, -6, -5}, 1000) == freqs({1, 2, 3}, 1000));

  RngStream rng(1);
  CHECK_THROWS_AS(choose_center_saliency(SaliencyWeights{{1, NAN}}, rng), InputError);
  CHECK_THROWS_AS(choose_center_saliency(SaliencyWeights{}, rng), InputError);
}

namespace {

Assignment identity(std::size_t n) {
  Assignment a;
  for (std::uint32_t i = 0; i < n; ++i) a.mapping.push_back(i);
  return a;
}

}  // namespace

TEST_CASE("apply_mix boundary and worked examples") {
  std::mt19937_64 gen(37);
  const auto x1 = random_cloud(gen, 4), x2 = random_cloud(gen, 4);
  const auto y1 = LabelDistribution::one_hot(0, 2), y2 = LabelDistribution::one_hot(1, 2);

  const auto all = apply_mix(x1, y1, x2, y2, identity(4), ReplacementMask::all_ones(4));
  CHECK(all.cloud == x1);
  CHECK(all.label == y1);

  const auto none = apply_mix(x1, y1, x2, y2, identity(4), ReplacementMask::all_zeros(4));
  CHECK(none.cloud == x2);
  CHECK(none.label == y2);

  const auto half = apply_mix(x1, y1, x2, y2, identity(4), ReplacementMask({1, 1, 0, 0}));
  CHECK(half.cloud == PointCloud({x1[0], x1[1], x2[2], x2[3]}));
  CHECK(half.label[0] == 0.5);
  CHECK(half.label[1] == 0.5);
  CHECK(half.lambda_effective() == 0.5);

  CHECK_THROWS_AS(apply_mix(x1, y1, random_cloud(gen, 5), y2, identity(4), ReplacementMask::all_ones(4)), InputError);
  CHECK_THROWS_AS(apply_mix(x1, y1, x2, LabelDistribution::one_hot(0, 3), identity(4), ReplacementMask::all_ones(4)),
                  InputError);
  CHECK_THROWS_AS(apply_mix(x1, y1, x2, y2, identity(3), ReplacementMask::all_ones(4)), InputError);
}

TEST_CASE("apply_mix_segmentation carries part labels") {
  std::mt19937_64 gen(38);
  const auto x1 = random_cloud(gen, 16), x2 = random_cloud(gen, 16);
  const auto y1 = LabelDistribution::one_hot(0, 3), y2 = LabelDistribution::one_hot(2, 3);
  PartLabels p1, p2;
  for (int i = 0; i < 16; ++i) {
    p1.labels.push_back(i);
    p2.labels.push_back(100 + i);
  }
  CHECK(apply_mix_segmentation(x1, p1, y1, x2, p2, y2, identity(16), ReplacementMask::all_ones(16)).part_labels == p1);
  CHECK(apply_mix_segmentation(x1, p1, y1, x2, p2, y2, identity(16), ReplacementMask::all_zeros(16)).part_labels == p2);

  RngStream rng(39);
  for (int trial = 0; trial < 200; ++trial) {
    Assignment perm = identity(16);
    for (std::size_t i = 15; i > 0; --i) std::swap(perm.mapping[i], perm.mapping[rng.uniform_index(i + 1)]);
    const auto mask = mask_random(16, rng.uniform_index(17), rng);
    const auto s = apply_mix_segmentation(x1, p1, y1, x2, p2, y2, perm, mask);
    for (std::size_t i = 0; i < 16; ++i) {
      const int tag = s.part_labels->labels[i];
      if (tag < 100) {
        CHECK(mask.kept(i));
        CHECK(tag == static_cast<int>(i));
        CHECK(same_bits(s.cloud[i], x1[i]));
      } else {
        CHECK_FALSE(mask.kept(i));
        CHECK(static_cast<std::uint32_t>(tag - 100) == perm.mapping[i]);
        CHECK(same_bits(s.cloud[i], x2[tag - 100]));
      }
    }
    CHECK(s.label[0] == static_cast<double>(mask.n_kept()) / 16);
  }
  PartLabels short_labels{{1, 2}};
  CHECK_THROWS_AS(apply_mix_segmentation(x1, short_labels, y1, x2, p2, y2, identity(16), ReplacementMask::all_ones(16)),
                  InputError);
}

TEST_CASE("pointcutmix gate closed (rho = 0)") {
  std::mt19937_64 gen(40);
  const auto x1 = random_cloud(gen, 32), x2 = random_cloud(gen, 32);
  const auto y1 = LabelDistribution::one_hot(0, 2), y2 = LabelDistribution::one_hot(1, 2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng(seed);
    const auto s = pointcutmix(x1, y1, x2, y2, AugmentPolicy{1.0, 0.0, MixMode::K, seed}, rng);
    CHECK_FALSE(s.mixed);
    CHECK(s.cloud == x1);
    CHECK(s.label == y1);
    CHECK(s.mask.n_kept() == 32);
    // Exactly one draw consumed.
    RngStream ref(seed);
    ref.uniform();
    CHECK(rng.next_u64() == ref.next_u64());
  }
}

TEST_CASE("pointcutmix with lambda = 1 returns x1") {
  std::mt19937_64 gen(41);
  const auto x1 = random_cloud(gen, 32), x2 = random_cloud(gen, 32);
  const auto y1 = LabelDistribution::one_hot(0, 2), y2 = LabelDistribution::one_hot(1, 2);
  for (auto mode : {MixMode::R, MixMode::K}) {
    RngStream rng(1);
    const auto s = pointcutmix_fixed_lambda({x1, y1}, {x2, y2}, mode, 1.0, rng);
    CHECK(s.mixed);
    CHECK(s.params.n == 32);
    CHECK(s.cloud == x1);
    CHECK(s.label == y1);
  }
}

TEST_CASE("pointcutmix mode K at N = 1024 satisfies every structural clause") {
  std::mt19937_64 gen(42);
  const auto x1 = random_cloud(gen, 1024), x2 = random_cloud(gen, 1024, 0.7f);
  const auto y1 = LabelDistribution::one_hot(1, 3), y2 = LabelDistribution::one_hot(2, 3);
  RngStream rng(43);
  const auto s = pointcutmix(x1, y1, x2, y2, AugmentPolicy{1.0, 1.0, MixMode::K, 43}, rng);
  REQUIRE(s.mixed);
  const auto phi = optimal_assignment(x1, x2);
  const std::size_t n = s.mask.n_kept();
  CHECK(n == s.params.n);
  CHECK(n == kept_count(s.params.lambda, 1024));
  if (n > 0) {
    REQUIRE(s.params.center);
    CHECK(s.mask == ReplacementMask::from_indices(1024, testing::brute_knn(x1, *s.params.center, n)));
  }
  for (std::size_t i = 0; i < 1024; ++i)
    CHECK(same_bits(s.cloud[i], s.mask.kept(i) ? x1[i] : x2[phi.mapping[i]]));
  CHECK(s.label[1] == n / 1024.0);
  CHECK(s.label[2] == 1.0 - n / 1024.0);
  CHECK(s.label[0] == 0.0);
}

TEST_CASE("mode R symmetric role check") {
  std::mt19937_64 gen(44);
  const auto x1 = random_cloud(gen, 40), x2 = random_cloud(gen, 40);
  const auto y1 = LabelDistribution::one_hot(0, 2), y2 = LabelDistribution::one_hot(1, 2);
  RngStream rng(45);
  for (int t = 0; t < 20; ++t) {
    const auto phi = solve_exact(x1, x2);
    const auto mask = mask_random(40, rng.uniform_index(41), rng);
    const auto fwd = apply_mix(x1, y1, x2, y2, phi, mask);
    // Swapped roles: x2 keeps what x1 replaced, indexed through the inverse.
    const auto inv = phi.inverse();
    std::vector<std::uint32_t> keep2;
    for (std::uint32_t i = 0; i < 40; ++i)
      if (!mask.kept(i)) keep2.push_back(phi.mapping[i]);
    const auto bwd = apply_mix(x2, y2, x1, y1, inv, ReplacementMask::from_indices(40, keep2));
    auto key = [](const PointCloud& c) {
      std::vector<std::tuple<float, float, float>> v;
      for (auto p : c.points()) v.emplace_back(p.x, p.y, p.z);
      std::sort(v.begin(), v.end());
      return v;
    };
    CHECK(key(fwd.cloud) == key(bwd.cloud));
  }
}

TEST_CASE("pointcutmix determinism and mode S") {
  std::mt19937_64 gen(46);
  const auto x1 = random_cloud(gen, 128), x2 = random_cloud(gen, 128);
  const auto y1 = LabelDistribution::one_hot(0, 2), y2 = LabelDistribution::one_hot(1, 2);
  SaliencyWeights sal;
  for (int i = 0; i < 128; ++i) sal.values.push_back(static_cast<float>(i % 5 == 0 ? 10 : 0));
  for (auto mode : {MixMode::R, MixMode::K, MixMode::S}) {
    RngStream a(47), b(47);
    const AugmentPolicy p{1.0, 1.0, mode, 47};
    const auto s1 = pointcutmix(x1, y1, x2, y2, p, a, &sal);
    const auto s2 = pointcutmix(x1, y1, x2, y2, p, b, &sal);
    CHECK(s1.cloud == s2.cloud);
    CHECK(s1.mask == s2.mask);
    CHECK(s1.label == s2.label);
    if (mode == MixMode::S && s1.params.center) CHECK(*s1.params.center % 5 == 0);
  }
  RngStream rng(1);
  CHECK_THROWS_AS(pointcutmix(x1, y1, x2, y2, AugmentPolicy{1.0, 1.0, MixMode::S, 1}, rng), InputError);
  CHECK_THROWS_AS(pointcutmix(x1, y1, random_cloud(gen, 12), y2, AugmentPolicy{}, rng), InputError);
}

TEST_CASE("n = 0 under mode K skips centre selection") {
  std::mt19937_64 gen(48);
  const auto x1 = random_cloud(gen, 16), x2 = random_cloud(gen, 16);
  const auto y1 = LabelDistribution::one_hot(0, 2), y2 = LabelDistribution::one_hot(1, 2);
  RngStream rng(2);
  const auto s = pointcutmix_fixed_lambda({x1, y1}, {x2, y2}, MixMode::K, 0.0, rng);
  CHECK_FALSE(s.params.center.has_value());
  CHECK(s.mask.n_kept() == 0);
  CHECK(s.label == y2);
  RngStream untouched(2);
  CHECK(rng.next_u64() == untouched.next_u64());
}

TEST_CASE("gate opens with frequency rho") {
  std::mt19937_64 gen(49);
  const auto x1 = random_cloud(gen, 8), x2 = random_cloud(gen, 8);
  const auto y1 = LabelDistribution::one_hot(0, 2), y2 = LabelDistribution::one_hot(1, 2);
  int mixed = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    RngStream rng(mix64(50, i));
    mixed += pointcutmix(x1, y1, x2, y2, AugmentPolicy{1.0, 0.5, MixMode::R, 50}, rng).mixed;
  }
  CHECK(std::abs(mixed / double(n) - 0.5) <= 0.02);
}
