#pragma once

// Batch augmentation driver: scans a class-per-folder dataset, prepares every
// source (equalize, then unit-sphere normalize), and emits mixed samples for
// E epochs together with a JSON manifest.
//
// Every random choice for output (epoch e, sample i) comes from streams
// derived from mix64(seed, e, i), and source preparation from
// mix64(seed, kPrepareTag, file_index), so the output tree does not depend on
// the number of worker threads.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pcm/assignment.hpp"
#include "pcm/ingest.hpp"
#include "pcm/mixer.hpp"
#include "pcm/types.hpp"

namespace pcm {

inline constexpr std::uint64_t kPrepareTag = 0x70726570'61726521ULL;
inline constexpr std::uint64_t kPartnerTag = 0x70617274'6e657221ULL;

enum class Pairing { Random, RoundRobin };

Pairing parse_pairing(std::string_view text);
std::string_view to_string(Pairing p) noexcept;

struct DatasetFile {
  std::filesystem::path path;
  std::string id;  // "<class>/<file name>"
  std::size_t class_index = 0;
};

struct Dataset {
  std::vector<std::string> classes;  // alphabetical
  std::vector<DatasetFile> files;    // by class, then file name
};

// Class-per-folder layout; recognised extensions .ply .xyz .txt .pts .off.
Dataset scan_dataset(const std::filesystem::path& root);

struct PreparedSample {
  std::string id;
  std::size_t class_index = 0;
  std::size_t file_index = 0;
  std::uint64_t prepare_seed = 0;
  PointCloud cloud;
  std::optional<PartLabels> parts;
  std::optional<SaliencyWeights> saliency;
};

struct SkippedFile {
  std::string id;
  std::string reason;
};

struct AugmentOptions {
  AugmentPolicy policy;
  std::size_t num_points = 1024;
  std::size_t epochs = 1;
  Pairing pairing = Pairing::Random;
  std::size_t jobs = 1;
  bool segmentation = false;
  SolverConfig solver;
};

// Loads, equalizes and normalizes one file. Meshes (.off) are surface
// sampled first.
PreparedSample prepare_sample(const DatasetFile& file, std::size_t file_index, const AugmentOptions& options);

struct PreparedDataset {
  std::vector<std::string> classes;
  std::vector<PreparedSample> samples;
  std::vector<SkippedFile> skipped;
};

// Unreadable files are skipped (and reported); a file without per-point
// labels in segmentation mode is an InputError.
PreparedDataset prepare_dataset(const Dataset& dataset, const AugmentOptions& options);

std::uint64_t stream_seed(std::uint64_t base_seed, std::size_t epoch, std::size_t sample_index);

// Mix partner of sample i in epoch e (never i itself). Requires >= 2 samples.
std::size_t choose_partner(const AugmentOptions& options, std::size_t num_samples, std::size_t epoch,
                           std::size_t sample_index);

// The output for (epoch, sample_index); what the driver writes, and what a
// manifest entry replays to.
MixedSample augment_one(const PreparedDataset& data, const AugmentOptions& options, std::size_t epoch,
                        std::size_t sample_index);

std::filesystem::path output_relpath(const PreparedDataset& data, std::size_t epoch, std::size_t sample_index);

struct AugmentSummary {
  std::size_t outputs = 0;
  std::size_t mixed = 0;
  std::size_t skipped = 0;
};

// Runs the whole batch into out_dir and writes out_dir/manifest.json.
AugmentSummary run_augment(const std::filesystem::path& dataset_dir, const std::filesystem::path& out_dir,
                           const AugmentOptions& options);

// Runs fn(0..count-1) on `jobs` threads; rethrows the lowest-index failure.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace pcm
