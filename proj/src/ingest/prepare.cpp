#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pcm/error.hpp"
#include "pcm/ingest.hpp"
#include "pcm/simd.hpp"

namespace pcm {
namespace {

struct Vec3d {
  double x, y, z;
};

Vec3d to_d(const Vec3f& p) { return {p.x, p.y, p.z}; }

double triangle_area(const Vec3d& a, const Vec3d& b, const Vec3d& c) {
  const Vec3d u{b.x - a.x, b.y - a.y, b.z - a.z};
  const Vec3d v{c.x - a.x, c.y - a.y, c.z - a.z};
  const double cx = u.y * v.z - u.z * v.y;
  const double cy = u.z * v.x - u.x * v.z;
  const double cz = u.x * v.y - u.y * v.x;
  return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
}

}  // namespace

PointCloud sample_surface(const TriangleMesh& mesh, std::size_t n, RngStream& rng) {
  if (n < 1) throw InputError("sample_surface: N must be >= 1");
  std::vector<double> cumulative(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    for (auto v : face)
      if (v >= mesh.vertices.size()) throw InputError("sample_surface: face index out of range");
    total += triangle_area(to_d(mesh.vertices[face[0]]), to_d(mesh.vertices[face[1]]), to_d(mesh.vertices[face[2]]));
    cumulative[f] = total;
  }
  if (!(total > 0.0)) throw InputError("sample_surface: mesh has zero surface area");

  std::vector<Vec3f> pts;
  pts.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double target = rng.uniform() * total;
    auto f = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), target) -
                                      cumulative.begin());
    f = std::min(f, mesh.faces.size() - 1);
    double u = rng.uniform();
    double v = rng.uniform();
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const Vec3d a = to_d(mesh.vertices[mesh.faces[f][0]]);
    const Vec3d b = to_d(mesh.vertices[mesh.faces[f][1]]);
    const Vec3d c = to_d(mesh.vertices[mesh.faces[f][2]]);
    pts.push_back({static_cast<float>(a.x + u * (b.x - a.x) + v * (c.x - a.x)),
                   static_cast<float>(a.y + u * (b.y - a.y) + v * (c.y - a.y)),
                   static_cast<float>(a.z + u * (b.z - a.z) + v * (c.z - a.z))});
  }
  return PointCloud(std::move(pts));
}

std::vector<std::uint32_t> farthest_point_sample(const PointCloud& cloud, std::size_t n, std::uint32_t start_index) {
  if (n < 1 || n > cloud.size())
    throw InputError("farthest_point_sample: N = " + std::to_string(n) + " out of range [1, " +
                     std::to_string(cloud.size()) + "]");
  if (start_index >= cloud.size()) throw InputError("farthest_point_sample: start index out of range");

  const simd::PointsSoA pts(cloud.points());
  const auto& k = simd::kernels();
  std::vector<double> min_sq(cloud.size(), std::numeric_limits<double>::infinity());
  std::vector<std::uint32_t> picked;
  picked.reserve(n);
  std::uint32_t last = start_index;
  picked.push_back(last);
  // Picked points sit at -1 so duplicates of them still win over re-picks.
  min_sq[last] = -1.0;
  while (picked.size() < n) {
    last = static_cast<std::uint32_t>(k.fps_update(pts.view(), simd::Query::from(cloud[last]), min_sq.data()));
    picked.push_back(last);
    min_sq[last] = -1.0;
  }
  return picked;
}

std::vector<std::uint32_t> equalize_indices(const PointCloud& cloud, std::size_t n, RngStream& rng) {
  require_valid(cloud);
  if (n < 1) throw InputError("equalize: N must be >= 1");
  const std::size_t m = cloud.size();
  std::vector<std::uint32_t> idx;
  if (m >= n) {
    if (m == n) {
      idx.resize(m);
      std::iota(idx.begin(), idx.end(), 0u);
      return idx;
    }
    const auto start = static_cast<std::uint32_t>(rng.uniform_index(m));
    idx = farthest_point_sample(cloud, n, start);
    std::sort(idx.begin(), idx.end());
    return idx;
  }
  idx.resize(m);
  std::iota(idx.begin(), idx.end(), 0u);
  while (idx.size() < n) idx.push_back(static_cast<std::uint32_t>(rng.uniform_index(m)));
  return idx;
}

PointCloud equalize(const PointCloud& cloud, std::size_t n, RngStream& rng) {
  return cloud.gather(equalize_indices(cloud, n, rng));
}

PointCloud normalize_unit_sphere(const PointCloud& cloud) {
  require_valid(cloud);
  double cx = 0.0, cy = 0.0, cz = 0.0;
  for (const auto& p : cloud.points()) {
    cx += p.x;
    cy += p.y;
    cz += p.z;
  }
  const double inv_n = 1.0 / static_cast<double>(cloud.size());
  cx *= inv_n;
  cy *= inv_n;
  cz *= inv_n;
  double radius = 0.0;
  for (const auto& p : cloud.points()) {
    const double dx = p.x - cx, dy = p.y - cy, dz = p.z - cz;
    radius = std::max(radius, std::sqrt(dx * dx + dy * dy + dz * dz));
  }
  if (!(radius > 0.0)) throw InputError("normalize_unit_sphere: all points coincide, scale is undefined");
  std::vector<Vec3f> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud.points())
    out.push_back({static_cast<float>((p.x - cx) / radius), static_cast<float>((p.y - cy) / radius),
                   static_cast<float>((p.z - cz) / radius)});
  return PointCloud(std::move(out));
}

}  // namespace pcm
