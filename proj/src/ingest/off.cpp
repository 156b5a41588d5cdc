#include <string>

#include "pcm/error.hpp"
#include "pcm/ingest.hpp"
#include "text.hpp"

namespace pcm {
namespace {

// Next line with content after comment stripping, or nullopt at EOF.
std::optional<std::vector<std::string_view>> next_tokens(text::LineReader& reader) {
  while (auto line = reader.next()) {
    auto tokens = text::split(text::strip_comment(*line));
    if (!tokens.empty()) return tokens;
  }
  return std::nullopt;
}

}  // namespace

TriangleMesh parse_off(std::string_view text) {
  text::LineReader reader(text);
  auto header = next_tokens(reader);
  if (!header || !header->front().starts_with("OFF"))
    throw ParseError("missing OFF header", header ? reader.line_no() : 1);

  std::vector<std::string_view> counts;
  const std::string_view fused = header->front().substr(3);
  if (!fused.empty()) {
    counts.push_back(fused);
    counts.insert(counts.end(), header->begin() + 1, header->end());
  } else if (header->size() > 1) {
    counts.assign(header->begin() + 1, header->end());
  } else {
    auto line = next_tokens(reader);
    if (!line) throw ParseError("missing vertex/face counts", reader.line_no() + 1);
    counts = *line;
  }
  if (counts.size() < 2) throw ParseError("counts line needs V F [E]", reader.line_no());
  const auto nv = text::parse_number<std::size_t>(counts[0]);
  const auto nf = text::parse_number<std::size_t>(counts[1]);
  if (!nv || !nf) throw ParseError("malformed vertex/face counts", reader.line_no());

  TriangleMesh mesh;
  mesh.vertices.reserve(*nv);
  for (std::size_t v = 0; v < *nv; ++v) {
    auto tokens = next_tokens(reader);
    if (!tokens)
      throw ParseError("expected vertex " + std::to_string(v + 1) + " of " + std::to_string(*nv) + ", got end of file",
                       reader.line_no() + 1);
    if (tokens->size() < 3) throw ParseError("vertex needs 3 coordinates", reader.line_no());
    float c[3];
    for (int a = 0; a < 3; ++a) {
      auto value = text::parse_number<float>((*tokens)[a]);
      if (!value) throw ParseError("malformed coordinate '" + std::string((*tokens)[a]) + "'", reader.line_no());
      if (!std::isfinite(*value)) throw ParseError("non-finite coordinate", reader.line_no());
      c[a] = *value;
    }
    mesh.vertices.push_back({c[0], c[1], c[2]});
  }

  mesh.faces.reserve(*nf);
  for (std::size_t f = 0; f < *nf; ++f) {
    auto tokens = next_tokens(reader);
    if (!tokens)
      throw ParseError("expected face " + std::to_string(f + 1) + " of " + std::to_string(*nf) + ", got end of file",
                       reader.line_no() + 1);
    const auto arity = text::parse_number<std::size_t>(tokens->front());
    if (!arity) throw ParseError("malformed face arity", reader.line_no());
    if (*arity < 3) throw ParseError("face arity " + std::to_string(*arity) + " < 3", reader.line_no());
    if (*arity > 4) throw ParseError("face arity " + std::to_string(*arity) + " > 4 is unsupported", reader.line_no());
    if (tokens->size() < *arity + 1) throw ParseError("face lists fewer indices than its arity", reader.line_no());
    std::uint32_t idx[4];
    for (std::size_t k = 0; k < *arity; ++k) {
      auto value = text::parse_number<std::uint32_t>((*tokens)[k + 1]);
      if (!value || *value >= mesh.vertices.size())
        throw ParseError("face index '" + std::string((*tokens)[k + 1]) + "' out of range", reader.line_no());
      idx[k] = *value;
    }
    mesh.faces.push_back({idx[0], idx[1], idx[2]});
    if (*arity == 4) mesh.faces.push_back({idx[0], idx[2], idx[3]});
  }
  return mesh;
}

}  // namespace pcm
