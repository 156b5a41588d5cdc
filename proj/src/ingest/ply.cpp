#include <cstdio>
#include <string>

#include "pcm/error.hpp"
#include "pcm/ingest.hpp"
#include "text.hpp"

namespace pcm {
namespace {

struct Property {
  std::string name;
  bool is_list = false;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

int find_property(const Element& e, std::string_view name) {
  for (std::size_t i = 0; i < e.properties.size(); ++i)
    if (e.properties[i].name == name) return static_cast<int>(i);
  return -1;
}

}  // namespace

PlyCloud parse_ply(std::string_view text) {
  text::LineReader reader(text);
  auto magic = reader.next();
  if (!magic || text::split(*magic) != std::vector<std::string_view>{"ply"}) throw ParseError("missing 'ply' magic", 1);

  std::vector<Element> elements;
  bool format_seen = false;
  for (;;) {
    auto line = reader.next();
    if (!line) throw ParseError("header ends without end_header", reader.line_no() + 1);
    const auto tokens = text::split(*line);
    if (tokens.empty()) continue;
    const auto& key = tokens[0];
    if (key == "end_header") break;
    if (key == "comment" || key == "obj_info") continue;
    if (key == "format") {
      if (tokens.size() < 2) throw ParseError("malformed format line", reader.line_no());
      if (tokens[1] != "ascii")
        throw InputError("unsupported PLY format '" + std::string(tokens[1]) + "': only ASCII PLY is supported");
      format_seen = true;
    } else if (key == "element") {
      if (tokens.size() != 3) throw ParseError("malformed element line", reader.line_no());
      auto count = text::parse_number<std::size_t>(tokens[2]);
      if (!count) throw ParseError("malformed element count", reader.line_no());
      elements.push_back({std::string(tokens[1]), *count, {}});
    } else if (key == "property") {
      if (elements.empty()) throw ParseError("property before any element", reader.line_no());
      if (tokens.size() >= 2 && tokens[1] == "list") {
        if (tokens.size() != 5) throw ParseError("malformed list property", reader.line_no());
        elements.back().properties.push_back({std::string(tokens[4]), true});
      } else {
        if (tokens.size() != 3) throw ParseError("malformed property line", reader.line_no());
        elements.back().properties.push_back({std::string(tokens[2]), false});
      }
    } else {
      throw ParseError("unknown header keyword '" + std::string(key) + "'", reader.line_no());
    }
  }
  if (!format_seen) throw ParseError("header lacks a format line");

  PlyCloud out;
  bool vertex_seen = false;
  for (const auto& element : elements) {
    const bool is_vertex = element.name == "vertex";
    int px = -1, py = -1, pz = -1, plabel = -1, psal = -1;
    if (is_vertex) {
      if (vertex_seen) throw ParseError("duplicate vertex element");
      vertex_seen = true;
      px = find_property(element, "x");
      py = find_property(element, "y");
      pz = find_property(element, "z");
      if (px < 0 || py < 0 || pz < 0) throw InputError("PLY vertex element lacks x, y or z");
      for (int p : {px, py, pz})
        if (element.properties[p].is_list) throw InputError("PLY x/y/z must be scalar properties");
      plabel = find_property(element, "label");
      psal = find_property(element, "saliency");
    }

    std::vector<Vec3f> pts;
    PartLabels labels;
    SaliencyWeights saliency;
    if (is_vertex) pts.reserve(element.count);
    for (std::size_t r = 0; r < element.count; ++r) {
      auto line = reader.next();
      while (line && text::split(*line).empty()) line = reader.next();
      if (!line)
        throw ParseError("expected " + element.name + " " + std::to_string(r + 1) + " of " +
                             std::to_string(element.count) + ", got end of file",
                         reader.line_no() + 1);
      if (!is_vertex) continue;
      const auto tokens = text::split(*line);
      // Resolve each property's token position (list properties vary in width).
      std::vector<std::size_t> pos(element.properties.size());
      std::size_t t = 0;
      for (std::size_t p = 0; p < element.properties.size(); ++p) {
        if (t >= tokens.size()) throw ParseError("vertex line has too few values", reader.line_no());
        pos[p] = t;
        if (element.properties[p].is_list) {
          auto len = text::parse_number<std::size_t>(tokens[t]);
          if (!len) throw ParseError("malformed list length", reader.line_no());
          t += 1 + *len;
        } else {
          t += 1;
        }
      }
      if (t > tokens.size()) throw ParseError("vertex line has too few values", reader.line_no());
      auto coord = [&](int p) {
        auto v = text::parse_number<float>(tokens[pos[p]]);
        if (!v) throw ParseError("malformed value '" + std::string(tokens[pos[p]]) + "'", reader.line_no());
        if (!std::isfinite(*v)) throw ParseError("non-finite coordinate", reader.line_no());
        return *v;
      };
      pts.push_back({coord(px), coord(py), coord(pz)});
      if (plabel >= 0) {
        auto v = text::parse_number<std::int32_t>(tokens[pos[plabel]]);
        if (!v) throw ParseError("label must be an integer", reader.line_no());
        labels.labels.push_back(*v);
      }
      if (psal >= 0) {
        auto v = text::parse_number<float>(tokens[pos[psal]]);
        if (!v || !std::isfinite(*v)) throw ParseError("saliency must be a finite number", reader.line_no());
        saliency.values.push_back(*v);
      }
    }
    if (is_vertex) {
      out.cloud = PointCloud(std::move(pts));
      if (plabel >= 0) out.labels = std::move(labels);
      if (psal >= 0) out.saliency = std::move(saliency);
    }
  }
  if (!vertex_seen) throw InputError("PLY has no vertex element");
  return out;
}

std::string write_ply(const PointCloud& cloud, const PartLabels* labels, const SaliencyWeights* saliency) {
  if (labels && labels->size() != cloud.size()) throw InputError("write_ply: labels do not align with the cloud");
  if (saliency && saliency->size() != cloud.size()) throw InputError("write_ply: saliency does not align with the cloud");
  std::string out;
  out.reserve(64 * cloud.size() + 256);
  out += "ply\nformat ascii 1.0\nelement vertex " + std::to_string(cloud.size()) + "\n";
  out += "property float x\nproperty float y\nproperty float z\n";
  if (labels) out += "property int label\n";
  if (saliency) out += "property float saliency\n";
  out += "end_header\n";
  char buf[96];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud[i];
    int len = std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g", p.x, p.y, p.z);
    out.append(buf, static_cast<std::size_t>(len));
    if (labels) {
      len = std::snprintf(buf, sizeof buf, " %d", labels->labels[i]);
      out.append(buf, static_cast<std::size_t>(len));
    }
    if (saliency) {
      len = std::snprintf(buf, sizeof buf, " %.9g", saliency->values[i]);
      out.append(buf, static_cast<std::size_t>(len));
    }
    out += '\n';
  }
  return out;
}

}  // namespace pcm
