#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcm {

// Coordinates are stored at dataset precision; geometry that feeds cost
// comparisons is evaluated in double.
struct Vec3f {
  float x = 0.0f;
  float y = 0.0f;
  float z = 0.0f;

  friend bool operator==(const Vec3f&, const Vec3f&) = default;
};

// Bitwise equality (distinguishes -0.0f from 0.0f).
bool same_bits(const Vec3f& a, const Vec3f& b) noexcept;

double squared_distance(const Vec3f& a, const Vec3f& b) noexcept;
double distance(const Vec3f& a, const Vec3f& b) noexcept;

// Ordered set of N points. Index i identifies point P_i.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Vec3f> points) : points_(std::move(points)) {}

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const Vec3f& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Vec3f> points() const noexcept { return points_; }

  // Points at `indices`, in that order.
  PointCloud gather(std::span<const std::uint32_t> indices) const;

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::vector<Vec3f> points_;
};

struct ValidationResult {
  bool ok = true;
  std::string reason;

  explicit operator bool() const noexcept { return ok; }
};

// Checks N >= 1 and that every coordinate is finite; reports the first
// violation found.
ValidationResult validate_cloud(const PointCloud& cloud);

// Throws InputError with the validation reason.
void require_valid(const PointCloud& cloud, std::string_view what = "point cloud");

// Dense class weights over C classes.
class LabelDistribution {
 public:
  LabelDistribution() = default;
  explicit LabelDistribution(std::vector<double> weights);

  static LabelDistribution one_hot(std::size_t class_index, std::size_t num_classes);

  std::size_t num_classes() const noexcept { return weights_.size(); }
  double operator[](std::size_t c) const { return weights_[c]; }
  std::span<const double> weights() const noexcept { return weights_; }

  double sum() const noexcept;
  // Smallest index holding the largest weight.
  std::size_t argmax() const noexcept;
  std::size_t nonzero_count() const noexcept;

  friend bool operator==(const LabelDistribution&, const LabelDistribution&) = default;

 private:
  std::vector<double> weights_;
};

// Per-point part ids, aligned with a cloud.
struct PartLabels {
  std::vector<std::int32_t> labels;

  std::size_t size() const noexcept { return labels.size(); }
  PartLabels gather(std::span<const std::uint32_t> indices) const;
  friend bool operator==(const PartLabels&, const PartLabels&) = default;
};

// Per-point saliency scores, aligned with a cloud. Ingested, never computed.
struct SaliencyWeights {
  std::vector<float> values;

  std::size_t size() const noexcept { return values.size(); }
  SaliencyWeights gather(std::span<const std::uint32_t> indices) const;
  friend bool operator==(const SaliencyWeights&, const SaliencyWeights&) = default;
};

// mapping[i] is the index in the second cloud matched to point i of the first.
struct Assignment {
  std::vector<std::uint32_t> mapping;
  double total_cost = 0.0;
  bool is_exact = false;

  std::size_t size() const noexcept { return mapping.size(); }
  Assignment inverse() const;
};

bool is_permutation(std::span<const std::uint32_t> mapping);

// Diagonal of the replacement matrix: keep[i] = 1 keeps x1's point i,
// 0 takes the assigned point from x2.
class ReplacementMask {
 public:
  ReplacementMask() = default;
  explicit ReplacementMask(std::vector<std::uint8_t> keep);

  static ReplacementMask all_ones(std::size_t n);
  static ReplacementMask all_zeros(std::size_t n);
  static ReplacementMask from_indices(std::size_t n, std::span<const std::uint32_t> kept);

  std::size_t size() const noexcept { return keep_.size(); }
  std::size_t n_kept() const noexcept { return n_kept_; }
  bool kept(std::size_t i) const { return keep_[i] != 0; }
  std::span<const std::uint8_t> bits() const noexcept { return keep_; }

  ReplacementMask complement() const;

  friend bool operator==(const ReplacementMask&, const ReplacementMask&) = default;

 private:
  std::vector<std::uint8_t> keep_;
  std::size_t n_kept_ = 0;
};

// Replacement strategy: random subset, kNN patch, saliency-centred kNN patch.
enum class MixMode { R, K, S };

std::string_view to_string(MixMode mode) noexcept;
// Accepts r|k|s in either case.
MixMode parse_mix_mode(std::string_view text);

struct MixParams {
  double beta = 1.0;
  // Sampled ratio; n = floor(lambda * N).
  double lambda = 1.0;
  std::size_t n = 0;
  MixMode mode = MixMode::K;
  // Patch centre for modes K and S (absent for R, n = 0, or gated samples).
  std::optional<std::uint32_t> center;
};

struct AugmentPolicy {
  double beta = 1.0;
  double rho = 1.0;
  MixMode mode = MixMode::K;
  std::uint64_t seed = 0;

  // Throws InputError unless beta > 0 and rho in [0, 1].
  void validate() const;
};

struct MixedSample {
  PointCloud cloud;
  LabelDistribution label;
  std::optional<PartLabels> part_labels;
  ReplacementMask mask;
  MixParams params;
  // False when the rho gate stayed closed and x1 passed through untouched.
  bool mixed = false;
  std::string source_a;
  std::optional<std::string> source_b;

  double lambda_effective() const noexcept {
    return mask.size() ? static_cast<double>(mask.n_kept()) / static_cast<double>(mask.size()) : 1.0;
  }
};

}  // namespace pcm
