#include "pcm/mixer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "pcm/error.hpp"

namespace pcm {

double sample_lambda(double beta, RngStream& rng) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InputError("beta must be > 0");
  const double g1 = rng.gamma(beta);
  const double g2 = rng.gamma(beta);
  const double total = g1 + g2;
  if (total == 0.0) return 0.5;
  return std::clamp(g1 / total, 0.0, 1.0);
}

std::size_t kept_count(double lambda, std::size_t n_points) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InputError("lambda must lie in [0, 1]");
  const auto n = static_cast<std::size_t>(std::floor(lambda * static_cast<double>(n_points)));
  return std::min(n, n_points);
}

ReplacementMask mask_random(std::size_t n_points, std::size_t n, RngStream& rng) {
  if (n > n_points) throw InputError("mask_random: n exceeds N");
  std::vector<std::uint32_t> idx(n_points);
  std::iota(idx.begin(), idx.end(), 0u);
  for (std::size_t t = 0; t < n; ++t) {
    const auto r = t + rng.uniform_index(n_points - t);
    std::swap(idx[t], idx[r]);
  }
  return ReplacementMask::from_indices(n_points, std::span(idx).first(n));
}

ReplacementMask mask_knn(const PointCloud& cloud, std::size_t n, std::uint32_t center_index,
                         const SpatialIndex& index) {
  if (index.size() != cloud.size()) throw InputError("mask_knn: index built over a different cloud");
  if (n < 1 || n > cloud.size()) throw InputError("mask_knn: n out of range");
  if (center_index >= cloud.size()) throw InputError("mask_knn: center index out of range");
  const auto kept = index.knn(center_index, n);
  return ReplacementMask::from_indices(cloud.size(), kept);
}

std::uint32_t choose_center_saliency(const SaliencyWeights& weights, RngStream& rng) {
  constexpr double kDelta = 1e-12;
  if (weights.values.empty()) throw InputError("saliency weights are empty");
  double lo = std::numeric_limits<double>::infinity();
  for (float w : weights.values) {
    if (!std::isfinite(w)) throw InputError("saliency weights must be finite");
    lo = std::min(lo, static_cast<double>(w));
  }
  std::vector<double> cumulative(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    total += (static_cast<double>(weights.values[i]) - lo) + kDelta;
    cumulative[i] = total;
  }
  const double target = rng.uniform() * total;
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  const auto i = static_cast<std::size_t>(it - cumulative.begin());
  return static_cast<std::uint32_t>(std::min(i, weights.size() - 1));
}

namespace {

void check_mix_inputs(const PointCloud& x1, const LabelDistribution& y1, const PointCloud& x2,
                      const LabelDistribution& y2, const Assignment& assignment, const ReplacementMask& mask) {
  const std::size_t n = x1.size();
  if (n == 0) throw InputError("apply_mix: empty cloud");
  if (x2.size() != n || mask.size() != n || assignment.size() != n)
    throw InputError("apply_mix: clouds, mask and assignment must all have N = " + std::to_string(n));
  if (y1.num_classes() != y2.num_classes()) throw InputError("apply_mix: class count mismatch");
  if (!is_permutation(assignment.mapping)) throw InputError("apply_mix: assignment is not a bijection");
}

LabelDistribution fuse_labels(const LabelDistribution& y1, const LabelDistribution& y2, double lambda) {
  std::vector<double> w(y1.num_classes());
  for (std::size_t c = 0; c < w.size(); ++c) w[c] = lambda * y1[c] + (1.0 - lambda) * y2[c];
  return LabelDistribution(std::move(w));
}

}  // namespace

MixedSample apply_mix(const PointCloud& x1, const LabelDistribution& y1, const PointCloud& x2,
                      const LabelDistribution& y2, const Assignment& assignment, const ReplacementMask& mask) {
  check_mix_inputs(x1, y1, x2, y2, assignment, mask);
  const std::size_t n = x1.size();
  std::vector<Vec3f> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = mask.kept(i) ? x1[i] : x2[assignment.mapping[i]];

  MixedSample s;
  s.cloud = PointCloud(std::move(pts));
  s.mask = mask;
  s.label = fuse_labels(y1, y2, s.lambda_effective());
  s.params.lambda = s.lambda_effective();
  s.params.n = mask.n_kept();
  s.mixed = true;
  return s;
}

MixedSample apply_mix_segmentation(const PointCloud& x1, const PartLabels& parts1, const LabelDistribution& y1,
                                   const PointCloud& x2, const PartLabels& parts2, const LabelDistribution& y2,
                                   const Assignment& assignment, const ReplacementMask& mask) {
  if (parts1.size() != x1.size() || parts2.size() != x2.size())
    throw InputError("apply_mix_segmentation: part labels must align with their clouds");
  MixedSample s = apply_mix(x1, y1, x2, y2, assignment, mask);
  PartLabels parts;
  parts.labels.resize(x1.size());
  for (std::size_t i = 0; i < x1.size(); ++i)
    parts.labels[i] = mask.kept(i) ? parts1.labels[i] : parts2.labels[assignment.mapping[i]];
  s.part_labels = std::move(parts);
  return s;
}

namespace {

void check_inputs(const MixInput& a, const MixInput& b, MixMode mode) {
  require_valid(a.cloud, "first cloud");
  require_valid(b.cloud, "second cloud");
  if (a.cloud.size() != b.cloud.size()) throw InputError("pointcutmix: clouds must have equal size");
  if (a.label.num_classes() != b.label.num_classes()) throw InputError("pointcutmix: class count mismatch");
  if ((a.parts == nullptr) != (b.parts == nullptr))
    throw InputError("pointcutmix: part labels must be given for both inputs or neither");
  if (mode == MixMode::S) {
    if (a.saliency == nullptr) throw InputError("mode S requires saliency weights for the first cloud");
    if (a.saliency->size() != a.cloud.size()) throw InputError("saliency weights must align with the first cloud");
  }
}

MixedSample passthrough(const MixInput& a, double beta, MixMode mode) {
  MixedSample s;
  s.cloud = a.cloud;
  s.label = a.label;
  if (a.parts) s.part_labels = *a.parts;
  s.mask = ReplacementMask::all_ones(a.cloud.size());
  s.params = MixParams{beta, 1.0, a.cloud.size(), mode, std::nullopt};
  s.mixed = false;
  return s;
}

MixedSample mix_with_lambda(const MixInput& a, const MixInput& b, MixMode mode, double beta, double lambda,
                            RngStream& rng, const SolverConfig& solver) {
  const std::size_t n_points = a.cloud.size();
  const std::size_t n = kept_count(lambda, n_points);
  const Assignment assignment = optimal_assignment(a.cloud, b.cloud, solver);

  std::optional<std::uint32_t> center;
  ReplacementMask mask;
  if (mode == MixMode::R) {
    mask = mask_random(n_points, n, rng);
  } else if (n == 0) {
    mask = ReplacementMask::all_zeros(n_points);
  } else {
    center = mode == MixMode::K ? static_cast<std::uint32_t>(rng.uniform_index(n_points))
                                : choose_center_saliency(*a.saliency, rng);
    mask = mask_knn(a.cloud, n, *center, SpatialIndex(a.cloud));
  }

  MixedSample s = a.parts ? apply_mix_segmentation(a.cloud, *a.parts, a.label, b.cloud, *b.parts, b.label,
                                                   assignment, mask)
                          : apply_mix(a.cloud, a.label, b.cloud, b.label, assignment, mask);
  s.params = MixParams{beta, lambda, n, mode, center};
  return s;
}

}  // namespace

MixedSample pointcutmix(const MixInput& a, const MixInput& b, const AugmentPolicy& policy, RngStream& rng,
                        const SolverConfig& solver) {
  policy.validate();
  check_inputs(a, b, policy.mode);
  const double u = rng.uniform();
  if (u >= policy.rho) return passthrough(a, policy.beta, policy.mode);
  const double lambda = sample_lambda(policy.beta, rng);
  return mix_with_lambda(a, b, policy.mode, policy.beta, lambda, rng, solver);
}

MixedSample pointcutmix_fixed_lambda(const MixInput& a, const MixInput& b, MixMode mode, double lambda,
                                     RngStream& rng, const SolverConfig& solver) {
  check_inputs(a, b, mode);
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InputError("lambda must lie in [0, 1]");
  return mix_with_lambda(a, b, mode, 1.0, lambda, rng, solver);
}

MixedSample pointcutmix(const PointCloud& x1, const LabelDistribution& y1, const PointCloud& x2,
                        const LabelDistribution& y2, const AugmentPolicy& policy, RngStream& rng,
                        const SaliencyWeights* saliency, const SolverConfig& solver) {
  return pointcutmix(MixInput{x1, y1, nullptr, saliency}, MixInput{x2, y2}, policy, rng, solver);
}

}  // namespace pcm
