#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcm/rng.hpp"
#include "pcm/types.hpp"

namespace pcm {

struct TriangleMesh {
  std::vector<Vec3f> vertices;
  std::vector<std::array<std::uint32_t, 3>> faces;
};

// ASCII OFF. Header "OFF" (optionally fused with the counts, as in
// "OFF490 518 0"), counts "V F [E]", V vertex lines, F faces with a leading
// arity. Quads are fanned into (0,1,2), (0,2,3); arity > 4 is rejected.
// '#' starts a comment. Errors are ParseError carrying the line number.
TriangleMesh parse_off(std::string_view text);

// A cloud as stored in ASCII PLY: vertex element with x, y, z and the
// optional per-vertex "label" (int) and "saliency" (float) properties.
struct PlyCloud {
  PointCloud cloud;
  std::optional<PartLabels> labels;
  std::optional<SaliencyWeights> saliency;
};

// Binary PLY is rejected. Other elements (faces, ...) are skipped.
PlyCloud parse_ply(std::string_view text);

// Properties in the order x, y, z[, label][, saliency]; floats with 9
// significant digits, so parse_ply(write_ply(c)) reproduces c exactly.
std::string write_ply(const PointCloud& cloud, const PartLabels* labels = nullptr,
                      const SaliencyWeights* saliency = nullptr);

// One point per non-empty line, first three whitespace-separated fields;
// further fields are ignored.
PointCloud parse_xyz(std::string_view text);
std::string write_xyz(const PointCloud& cloud);

// N points, triangles chosen with probability proportional to area,
// positions by folded uniform barycentric coordinates. Three draws per
// point: triangle, u, v.
PointCloud sample_surface(const TriangleMesh& mesh, std::size_t n, RngStream& rng);

// Greedy farthest point sampling from start_index; ties go to the smaller
// index. Returns the picked indices in pick order.
std::vector<std::uint32_t> farthest_point_sample(const PointCloud& cloud, std::size_t n, std::uint32_t start_index);

// Indices realising equalize(): identity when sizes match, FPS with a random
// start (returned in ascending order) when downsampling, every original
// followed by uniform draws with replacement when padding.
std::vector<std::uint32_t> equalize_indices(const PointCloud& cloud, std::size_t n, RngStream& rng);
PointCloud equalize(const PointCloud& cloud, std::size_t n, RngStream& rng);

// Translate the centroid to the origin, then scale so the farthest point
// has norm 1. Throws InputError when every point coincides.
PointCloud normalize_unit_sphere(const PointCloud& cloud);

// File helpers. Clouds are dispatched on extension: .ply, or .xyz/.txt/.pts.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
PlyCloud load_cloud_file(const std::filesystem::path& path);
void save_cloud_file(const std::filesystem::path& path, const PointCloud& cloud, const PartLabels* labels = nullptr,
                     const SaliencyWeights* saliency = nullptr);

// Saliency from a PLY "saliency" property or a text file with one value per
// line.
SaliencyWeights load_saliency_file(const std::filesystem::path& path);

}  // namespace pcm
