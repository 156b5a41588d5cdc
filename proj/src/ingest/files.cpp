#include <fstream>
#include <sstream>

#include "pcm/error.hpp"
#include "pcm/ingest.hpp"
#include "text.hpp"

namespace pcm {
namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

PlyCloud load_cloud_file(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  const std::string body = read_text_file(path);
  try {
    if (ext == ".ply") return parse_ply(body);
    if (ext == ".xyz" || ext == ".txt" || ext == ".pts") return PlyCloud{parse_xyz(body), std::nullopt, std::nullopt};
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  throw InputError("unsupported cloud file extension '" + ext + "' (" + path.string() + ")");
}

void save_cloud_file(const std::filesystem::path& path, const PointCloud& cloud, const PartLabels* labels,
                     const SaliencyWeights* saliency) {
  const std::string ext = lower_extension(path);
  if (ext == ".ply") return write_text_file(path, write_ply(cloud, labels, saliency));
  if (ext == ".xyz" || ext == ".txt" || ext == ".pts") return write_text_file(path, write_xyz(cloud));
  throw InputError("unsupported output extension '" + ext + "' (use .ply or .xyz)");
}

SaliencyWeights load_saliency_file(const std::filesystem::path& path) {
  if (lower_extension(path) == ".ply") {
    auto ply = load_cloud_file(path);
    if (!ply.saliency) throw InputError(path.string() + ": PLY has no 'saliency' property");
    return *ply.saliency;
  }
  SaliencyWeights w;
  const std::string body = read_text_file(path);
  text::LineReader reader(body);
  while (auto line = reader.next()) {
    const auto tokens = text::split(*line);
    if (tokens.empty()) continue;
    auto v = text::parse_number<float>(tokens[0]);
    if (!v || !std::isfinite(*v))
      throw ParseError(path.string() + ": saliency value must be a finite number", reader.line_no());
    w.values.push_back(*v);
  }
  return w;
}

}  // namespace pcm
