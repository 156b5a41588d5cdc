#include <cmath>
#include <fstream>
#include <random>
#include <tuple>

#include "doctest.h"
#include "pcm/error.hpp"
#include "pcm/ingest.hpp"
#include "test_support.hpp"

using namespace pcm;
using pcm::testing::random_cloud;

namespace {

const std::filesystem::path kFixtures = PCM_FIXTURE_DIR;

int parse_error_line(std::string_view text) {
  try {
    parse_off(text);
  } catch (const ParseError& e) {
    return static_cast<int>(e.line());
  }
  return -1;
}

}  // namespace

TEST_CASE("OFF triangle and quad") {
  const auto m = parse_off("OFF\n4 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n3 0 1 2\n3 0 2 3\n");
  CHECK(m.vertices.size() == 4);
  REQUIRE(m.faces.size() == 2);
  CHECK(m.faces[1] == std::array<std::uint32_t, 3>{0, 2, 3});

  const auto q = parse_off("OFF\n# comment\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n");
  REQUIRE(q.faces.size() == 2);
  CHECK(q.faces[0] == std::array<std::uint32_t, 3>{0, 1, 2});
  CHECK(q.faces[1] == std::array<std::uint32_t, 3>{0, 2, 3});
}

TEST_CASE("OFF fused header and CRLF") {
  const auto m = parse_off("OFF3 1 0\r\n0 0 0\r\n1 0 0\r\n0 1 0\r\n3 0 1 2\r\n");
  CHECK(m.vertices.size() == 3);
  CHECK(m.faces.size() == 1);
}

TEST_CASE("OFF errors carry line numbers") {
  CHECK(parse_error_line("PLY\n") == 1);
  CHECK(parse_error_line("OFF\n3 1 0\n0 0 0\n1 0\n0 1 0\n3 0 1 2\n") == 4);
  CHECK(parse_error_line("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n5 0 1 2 0 1\n") == 6);
  CHECK(parse_error_line("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n") == 6);
  CHECK(parse_error_line("OFF\n3 1 0\n0 0 0\n1 0 0\n") > 0);
  CHECK(parse_error_line("OFF\n3 1 0\n0 0 0\n1 x 0\n0 1 0\n3 0 1 2\n") == 4);
}

TEST_CASE("fixture meshes parse") {
  const auto cube = parse_off(read_text_file(kFixtures / "cube.off"));
  CHECK(cube.vertices.size() == 8);
  CHECK(cube.faces.size() == 12);
  for (auto name : {"chair.off", "airplane.off"}) {
    const auto m = parse_off(read_text_file(kFixtures / name));
    CHECK(m.vertices.size() > 8);
    CHECK(m.faces.size() > 12);
  }
}

TEST_CASE("PLY round trip is exact") {
  std::mt19937_64 gen(51);
  const auto cloud = random_cloud(gen, 300, 3.0f);
  PartLabels labels;
  SaliencyWeights sal;
  for (int i = 0; i < 300; ++i) {
    labels.labels.push_back(i % 7 - 3);
    sal.values.push_back(static_cast<float>(std::ldexp(i, -5)));
  }
  const auto back = parse_ply(write_ply(cloud, &labels, &sal));
  CHECK(back.cloud == cloud);
  CHECK(back.labels == labels);
  CHECK(back.saliency == sal);

  const auto plain = parse_ply(write_ply(cloud));
  CHECK(plain.cloud == cloud);
  CHECK_FALSE(plain.labels.has_value());
  CHECK_FALSE(plain.saliency.has_value());
}

TEST_CASE("PLY with extra properties and a face element") {
  const auto p = parse_ply(
      "ply\nformat ascii 1.0\ncomment x\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\n"
      "property uchar red\nproperty int label\nelement face 1\nproperty list uchar int vertex_indices\n"
      "end_header\n0 0 0 255 1\n1 0 0 0 2\n0 1 0 9 3\n3 0 1 2\n");
  CHECK(p.cloud.size() == 3);
  REQUIRE(p.labels);
  CHECK(p.labels->labels == std::vector<std::int32_t>{1, 2, 3});
}

TEST_CASE("PLY errors") {
  CHECK_THROWS_AS(parse_ply("ply\nformat binary_little_endian 1.0\nelement vertex 1\nproperty float x\n"
                            "property float y\nproperty float z\nend_header\n"),
                  InputError);
  CHECK_THROWS_AS(parse_ply("ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\n"
                            "property float z\nend_header\n0 0 0\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_ply("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\n"
                            "end_header\n0 0\n"),
                  InputError);
  CHECK_THROWS_AS(parse_ply("not a ply\n"), InputError);
}

TEST_CASE("XYZ parse and round trip") {
  const auto c = parse_xyz("1 2 3\n\n4 5 6 0.1 0.2 0.3\n");
  CHECK(c == PointCloud({{1, 2, 3}, {4, 5, 6}}));
  std::mt19937_64 gen(52);
  const auto r = random_cloud(gen, 50);
  CHECK(parse_xyz(write_xyz(r)) == r);
  CHECK_THROWS_AS(parse_xyz("1 2\n"), ParseError);
  CHECK(parse_xyz(read_text_file(kFixtures / "six_a.xyz")).size() == 6);
}

TEST_CASE("surface sampling lies on the mesh and follows area") {
  // Two unit squares side by side in z = 0 and one square of quarter area at z = 5.
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {2, 0, 0}, {2, 1, 0}, {0, 1, 0}, {0, 0, 5}, {0.5f, 0, 5}, {0.5f, 1, 5}, {0, 1, 5}};
  m.faces = {{0, 1, 2}, {0, 2, 3}, {4, 5, 6}, {4, 6, 7}};
  RngStream rng(53);
  const auto c = sample_surface(m, 20000, rng);
  int top = 0;
  for (auto p : c.points()) {
    if (p.z == 5.0f) {
      ++top;
      CHECK(p.x >= 0.0f);
      CHECK(p.x <= 0.5f);
    } else {
      REQUIRE(p.z == 0.0f);
      CHECK(p.x >= 0.0f);
      CHECK(p.x <= 2.0f);
    }
    CHECK(p.y >= 0.0f);
    CHECK(p.y <= 1.0f);
  }
  CHECK(std::abs(top / 20000.0 - 0.2) < 0.01);

  RngStream a(1), b(1);
  CHECK(sample_surface(m, 64, a) == sample_surface(m, 64, b));
  // Three draws per point.
  RngStream ref(1);
  for (int i = 0; i < 64 * 3; ++i) ref.uniform();
  CHECK(a.next_u64() == ref.next_u64());

  TriangleMesh flat;
  flat.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  flat.faces = {{0, 1, 2}};
  CHECK_THROWS_AS(sample_surface(flat, 4, rng), InputError);
}

TEST_CASE("farthest point sampling equals the quadratic reference") {
  std::mt19937_64 gen(54);
  for (int trial = 0; trial < 50; ++trial) {
    auto cloud = random_cloud(gen, 10 + gen() % 200);
    if (trial % 4 == 0) {
      std::vector<Vec3f> q(cloud.points().begin(), cloud.points().end());
      for (std::size_t i = 0; i + 1 < q.size(); i += 3) q[i + 1] = q[i];
      cloud = PointCloud(q);
    }
    const std::size_t n = 1 + gen() % cloud.size();
    const auto start = static_cast<std::uint32_t>(gen() % cloud.size());
    CAPTURE(trial);
    CHECK(farthest_point_sample(cloud, n, start) == testing::brute_fps(cloud, n, start));
  }
  const PointCloud line({{0, 0, 0}, {1, 0, 0}, {3, 0, 0}, {10, 0, 0}});
  CHECK(farthest_point_sample(line, 3, 0) == std::vector<std::uint32_t>{0, 3, 2});
  CHECK_THROWS_AS(farthest_point_sample(line, 5, 0), InputError);
}

TEST_CASE("equalize") {
  std::mt19937_64 gen(55);
  const auto cloud = random_cloud(gen, 100);
  RngStream rng(56);
  CHECK(equalize(cloud, 100, rng) == cloud);

  const auto down = equalize_indices(cloud, 40, rng);
  CHECK(down.size() == 40);
  CHECK(std::is_sorted(down.begin(), down.end()));
  CHECK(std::adjacent_find(down.begin(), down.end()) == down.end());

  const auto up = equalize_indices(cloud, 250, rng);
  REQUIRE(up.size() == 250);
  for (std::uint32_t i = 0; i < 100; ++i) CHECK(up[i] == i);
  for (auto i : up) CHECK(i < 100);

  RngStream a(7), b(7);
  CHECK(equalize(cloud, 33, a) == equalize(cloud, 33, b));
  CHECK_THROWS_AS(equalize(PointCloud(), 10, rng), InputError);
  CHECK_THROWS_AS(equalize(cloud, 0, rng), InputError);
}

TEST_CASE("normalize_unit_sphere") {
  std::mt19937_64 gen(57);
  const auto cloud = random_cloud(gen, 500, 40.0f);
  const auto n = normalize_unit_sphere(cloud);
  double cx = 0, cy = 0, cz = 0, r = 0;
  for (auto p : n.points()) {
    cx += p.x;
    cy += p.y;
    cz += p.z;
    r = std::max(r, std::sqrt(double(p.x) * p.x + double(p.y) * p.y + double(p.z) * p.z));
  }
  CHECK(std::abs(cx / 500) < 1e-6);
  CHECK(std::abs(cy / 500) < 1e-6);
  CHECK(std::abs(cz / 500) < 1e-6);
  CHECK(r == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(normalize_unit_sphere(PointCloud({{1, 1, 1}, {1, 1, 1}})), InputError);
}

TEST_CASE("file helpers") {
  const auto dir = testing::temp_dir("ingest");
  std::mt19937_64 gen(58);
  const auto cloud = random_cloud(gen, 20);
  save_cloud_file(dir / "a" / "c.ply", cloud);
  CHECK(load_cloud_file(dir / "a" / "c.ply").cloud == cloud);
  save_cloud_file(dir / "c.xyz", cloud);
  CHECK(load_cloud_file(dir / "c.xyz").cloud == cloud);
  write_text_file(dir / "s.txt", "0.5\n1\n\n2.25\n");
  CHECK(load_saliency_file(dir / "s.txt").values == std::vector<float>{0.5f, 1.0f, 2.25f});
  CHECK_THROWS_AS(read_text_file(dir / "missing.ply"), InputError);
  CHECK_THROWS_AS(load_cloud_file(dir / "s.obj"), InputError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("normalize worked example and idempotence") {
  const auto n = normalize_unit_sphere(PointCloud({{1, 0, 0}, {3, 0, 0}}));
  CHECK(n == PointCloud({{-1, 0, 0}, {1, 0, 0}}));
  std::mt19937_64 gen(59);
  const auto once = normalize_unit_sphere(random_cloud(gen, 200, 5.0f));
  const auto twice = normalize_unit_sphere(once);
  for (std::size_t i = 0; i < 200; ++i) CHECK(std::sqrt(squared_distance(once[i], twice[i])) <= 1e-6);
}

TEST_CASE("equalize 2048 -> 1024 and 700 -> 1024") {
  std::mt19937_64 gen(60);
  const auto big = random_cloud(gen, 2048);
  RngStream rng(61);
  const auto down = equalize(big, 1024, rng);
  CHECK(down.size() == 1024);
  std::vector<std::tuple<float, float, float>> pool;
  for (auto p : big.points()) pool.emplace_back(p.x, p.y, p.z);
  std::sort(pool.begin(), pool.end());
  for (auto p : down.points()) CHECK(std::binary_search(pool.begin(), pool.end(), std::tuple{p.x, p.y, p.z}));

  const auto small = random_cloud(gen, 700);
  const auto up = equalize(small, 1024, rng);
  REQUIRE(up.size() == 1024);
  for (std::size_t i = 0; i < 700; ++i) CHECK(same_bits(up[i], small[i]));
  pool.clear();
  for (auto p : small.points()) pool.emplace_back(p.x, p.y, p.z);
  std::sort(pool.begin(), pool.end());
  for (std::size_t i = 700; i < 1024; ++i)
    CHECK(std::binary_search(pool.begin(), pool.end(), std::tuple{up[i].x, up[i].y, up[i].z}));
}
