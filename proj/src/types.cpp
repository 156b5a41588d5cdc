#include "pcm/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "pcm/error.hpp"

namespace pcm {

bool same_bits(const Vec3f& a, const Vec3f& b) noexcept {
  return std::memcmp(&a, &b, sizeof(Vec3f)) == 0;
}

double squared_distance(const Vec3f& a, const Vec3f& b) noexcept {
  const double dx = static_cast<double>(a.x) - static_cast<double>(b.x);
  const double dy = static_cast<double>(a.y) - static_cast<double>(b.y);
  const double dz = static_cast<double>(a.z) - static_cast<double>(b.z);
  return dx * dx + dy * dy + dz * dz;
}

double distance(const Vec3f& a, const Vec3f& b) noexcept {
  return std::sqrt(squared_distance(a, b));
}

PointCloud PointCloud::gather(std::span<const std::uint32_t> indices) const {
  std::vector<Vec3f> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(points_.at(i));
  return PointCloud(std::move(out));
}

ValidationResult validate_cloud(const PointCloud& cloud) {
  if (cloud.empty()) return {false, "cloud is empty (N >= 1 required)"};
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
      return {false, "point " + std::to_string(i) + " has a non-finite coordinate"};
  }
  return {};
}

void require_valid(const PointCloud& cloud, std::string_view what) {
  if (auto r = validate_cloud(cloud); !r) throw InputError(std::string(what) + ": " + r.reason);
}

LabelDistribution::LabelDistribution(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw InputError("label distribution needs at least one class");
  for (double w : weights_)
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("label weights must be finite and >= 0");
  if (std::abs(sum() - 1.0) > 1e-9) throw InputError("label weights must sum to 1");
}

LabelDistribution LabelDistribution::one_hot(std::size_t class_index, std::size_t num_classes) {
  if (class_index >= num_classes)
    throw InputError("class index " + std::to_string(class_index) + " out of range for " +
                     std::to_string(num_classes) + " classes");
  std::vector<double> w(num_classes, 0.0);
  w[class_index] = 1.0;
  return LabelDistribution(std::move(w));
}

double LabelDistribution::sum() const noexcept {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

std::size_t LabelDistribution::argmax() const noexcept {
  return static_cast<std::size_t>(std::max_element(weights_.begin(), weights_.end()) - weights_.begin());
}

std::size_t LabelDistribution::nonzero_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(weights_.begin(), weights_.end(), [](double w) { return w != 0.0; }));
}

PartLabels PartLabels::gather(std::span<const std::uint32_t> indices) const {
  PartLabels out;
  out.labels.reserve(indices.size());
  for (auto i : indices) out.labels.push_back(labels.at(i));
  return out;
}

SaliencyWeights SaliencyWeights::gather(std::span<const std::uint32_t> indices) const {
  SaliencyWeights out;
  out.values.reserve(indices.size());
  for (auto i : indices) out.values.push_back(values.at(i));
  return out;
}

Assignment Assignment::inverse() const {
  Assignment inv;
  inv.mapping.resize(mapping.size());
  for (std::size_t i = 0; i < mapping.size(); ++i) inv.mapping[mapping[i]] = static_cast<std::uint32_t>(i);
  inv.total_cost = total_cost;
  inv.is_exact = is_exact;
  return inv;
}

bool is_permutation(std::span<const std::uint32_t> mapping) {
  std::vector<bool> seen(mapping.size(), false);
  for (auto j : mapping) {
    if (j >= mapping.size() || seen[j]) return false;
    seen[j] = true;
  }
  return true;
}

ReplacementMask::ReplacementMask(std::vector<std::uint8_t> keep) : keep_(std::move(keep)) {
  for (auto& b : keep_) {
    if (b > 1) throw InputError("replacement mask bits must be 0 or 1");
    n_kept_ += b;
  }
}

ReplacementMask ReplacementMask::all_ones(std::size_t n) {
  return ReplacementMask(std::vector<std::uint8_t>(n, 1));
}

ReplacementMask ReplacementMask::all_zeros(std::size_t n) {
  return ReplacementMask(std::vector<std::uint8_t>(n, 0));
}

ReplacementMask ReplacementMask::from_indices(std::size_t n, std::span<const std::uint32_t> kept) {
  std::vector<std::uint8_t> bits(n, 0);
  for (auto i : kept) {
    if (i >= n) throw InputError("mask index out of range");
    bits[i] = 1;
  }
  return ReplacementMask(std::move(bits));
}

ReplacementMask ReplacementMask::complement() const {
  std::vector<std::uint8_t> bits(keep_.size());
  for (std::size_t i = 0; i < keep_.size(); ++i) bits[i] = keep_[i] ? 0 : 1;
  return ReplacementMask(std::move(bits));
}

std::string_view to_string(MixMode mode) noexcept {
  switch (mode) {
    case MixMode::R: return "R";
    case MixMode::K: return "K";
    case MixMode::S: return "S";
  }
  return "?";
}

MixMode parse_mix_mode(std::string_view text) {
  if (text == "r" || text == "R") return MixMode::R;
  if (text == "k" || text == "K") return MixMode::K;
  if (text == "s" || text == "S") return MixMode::S;
  throw InputError("unknown mix mode '" + std::string(text) + "' (expected r, k or s)");
}

void AugmentPolicy::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InputError("beta must be > 0");
  if (!(rho >= 0.0 && rho <= 1.0)) throw InputError("rho must lie in [0, 1]");
}

}  // namespace pcm
