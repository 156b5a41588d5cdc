#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "pcm/assignment.hpp"
#include "pcm/neighbors.hpp"
#include "pcm/rng.hpp"
#include "pcm/types.hpp"

namespace pcm {

// lambda ~ Beta(beta, beta) as g1 / (g1 + g2) with g1, g2 ~ Gamma(beta, 1).
// For beta = 1 the gammas are exponentials and lambda is exactly uniform.
double sample_lambda(double beta, RngStream& rng);

// floor(lambda * N), clamped to [0, N].
std::size_t kept_count(double lambda, std::size_t n_points);

// Exactly n of N bits set, uniform over subsets (partial Fisher-Yates).
ReplacementMask mask_random(std::size_t n_points, std::size_t n, RngStream& rng);

// Bits set at the n nearest neighbours of the centre, centre included.
// Requires 1 <= n <= N.
ReplacementMask mask_knn(const PointCloud& cloud, std::size_t n, std::uint32_t center_index,
                         const SpatialIndex& index);

// Draws i with probability (w_i - min w + 1e-12) / sum_k (w_k - min w + 1e-12).
std::uint32_t choose_center_saliency(const SaliencyWeights& weights, RngStream& rng);

// x~_i = x1_i where the mask keeps i, else x2_{mapping[i]};
// y~ = l * y1 + (1 - l) * y2 with l = n_kept / N.
MixedSample apply_mix(const PointCloud& x1, const LabelDistribution& y1, const PointCloud& x2,
                      const LabelDistribution& y2, const Assignment& assignment, const ReplacementMask& mask);

// apply_mix, with per-point part labels carried along with their points.
MixedSample apply_mix_segmentation(const PointCloud& x1, const PartLabels& parts1, const LabelDistribution& y1,
                                   const PointCloud& x2, const PartLabels& parts2, const LabelDistribution& y2,
                                   const Assignment& assignment, const ReplacementMask& mask);

// One labelled input of a mix. `parts` is used by the segmentation variant,
// `saliency` by mode S (first input only).
struct MixInput {
  const PointCloud& cloud;
  const LabelDistribution& label;
  const PartLabels* parts = nullptr;
  const SaliencyWeights* saliency = nullptr;
};

// The full augmentation step. Draw order on `rng`: the gate u ~ U[0, 1);
// if u >= rho, x1 is returned untouched and nothing else is drawn. Otherwise
// lambda, then the mask (R: subset; K: centre index, S: saliency centre;
// none when n = 0). The assignment is solved fresh on every call.
MixedSample pointcutmix(const MixInput& a, const MixInput& b, const AugmentPolicy& policy, RngStream& rng,
                        const SolverConfig& solver = {});

// Same, with a caller-fixed lambda instead of a Beta draw and no gate
// (used for ratio sweeps).
MixedSample pointcutmix_fixed_lambda(const MixInput& a, const MixInput& b, MixMode mode, double lambda,
                                     RngStream& rng, const SolverConfig& solver = {});

// Convenience overload for classification inputs.
MixedSample pointcutmix(const PointCloud& x1, const LabelDistribution& y1, const PointCloud& x2,
                        const LabelDistribution& y2, const AugmentPolicy& policy, RngStream& rng,
                        const SaliencyWeights* saliency = nullptr, const SolverConfig& solver = {});

}  // namespace pcm
