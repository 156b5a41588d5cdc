#include <cstdio>
#include <string>

#include "pcm/error.hpp"
#include "pcm/ingest.hpp"
#include "text.hpp"

namespace pcm {

PointCloud parse_xyz(std::string_view text) {
  text::LineReader reader(text);
  std::vector<Vec3f> pts;
  while (auto line = reader.next()) {
    const auto tokens = text::split(*line);
    if (tokens.empty()) continue;
    if (tokens.size() < 3)
      throw ParseError("expected at least 3 numeric fields, got " + std::to_string(tokens.size()), reader.line_no());
    float c[3];
    for (int a = 0; a < 3; ++a) {
      auto v = text::parse_number<float>(tokens[a]);
      if (!v) throw ParseError("non-numeric field '" + std::string(tokens[a]) + "'", reader.line_no());
      if (!std::isfinite(*v)) throw ParseError("non-finite coordinate", reader.line_no());
      c[a] = *v;
    }
    pts.push_back({c[0], c[1], c[2]});
  }
  return PointCloud(std::move(pts));
}

std::string write_xyz(const PointCloud& cloud) {
  std::string out;
  out.reserve(40 * cloud.size());
  char buf[80];
  for (const auto& p : cloud.points()) {
    const int len = std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n", p.x, p.y, p.z);
    out.append(buf, static_cast<std::size_t>(len));
  }
  return out;
}

}  // namespace pcm
