#include "pcm/augment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>

#include "pcm/error.hpp"
#include "pcm/manifest.hpp"

namespace pcm {

namespace fs = std::filesystem;

Pairing parse_pairing(std::string_view text) {
  if (text == "random") return Pairing::Random;
  if (text == "roundrobin") return Pairing::RoundRobin;
  throw InputError("unknown pairing '" + std::string(text) + "' (expected random or roundrobin)");
}

std::string_view to_string(Pairing p) noexcept {
  return p == Pairing::Random ? "random" : "roundrobin";
}

Json sample_record(const MixedSample& sample, const std::vector<std::string>& classes, const std::string& output_file,
                   std::uint64_t seed) {
  Json r;
  r["output_file"] = output_file;
  r["source_a_id"] = sample.source_a;
  if (sample.mixed && sample.source_b) r["source_b_id"] = *sample.source_b;
  r["mixed"] = sample.mixed;
  r["mode"] = std::string(to_string(sample.params.mode));
  r["lambda"] = sample.params.lambda;
  r["lambda_effective"] = sample.lambda_effective();
  r["n_kept"] = sample.mask.n_kept();
  r["num_points"] = sample.cloud.size();
  if (sample.params.center) r["center_index"] = *sample.params.center;
  Json weights = Json::object();
  for (std::size_t c = 0; c < sample.label.num_classes(); ++c) {
    const std::string key = c < classes.size() ? classes[c] : std::to_string(c);
    weights[key] = sample.label[c];
  }
  r["label_weights"] = std::move(weights);
  r["seed"] = seed;
  return r;
}

Dataset scan_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) throw InputError("dataset directory '" + root.string() + "' does not exist");
  Dataset d;
  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  std::sort(class_dirs.begin(), class_dirs.end());
  for (const auto& dir : class_dirs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      std::string ext = entry.path().extension().string();
      for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (ext == ".ply" || ext == ".xyz" || ext == ".txt" || ext == ".pts" || ext == ".off")
        files.push_back(entry.path());
    }
    if (files.empty()) continue;
    std::sort(files.begin(), files.end());
    const std::size_t class_index = d.classes.size();
    d.classes.push_back(dir.filename().string());
    for (auto& f : files)
      d.files.push_back({f, d.classes.back() + "/" + f.filename().string(), class_index});
  }
  if (d.files.empty()) throw InputError("dataset '" + root.string() + "' contains no cloud files");
  return d;
}

PreparedSample prepare_sample(const DatasetFile& file, std::size_t file_index, const AugmentOptions& options) {
  PreparedSample s;
  s.id = file.id;
  s.class_index = file.class_index;
  s.file_index = file_index;
  s.prepare_seed = mix64(options.policy.seed, kPrepareTag, file_index);
  RngStream rng(s.prepare_seed);

  PlyCloud raw;
  std::string ext = file.path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".off") {
    TriangleMesh mesh;
    try {
      mesh = parse_off(read_text_file(file.path));
    } catch (const ParseError& e) {
      throw ParseError(file.path.string() + ": " + e.what());
    }
    raw.cloud = sample_surface(mesh, options.num_points, rng);
  } else {
    raw = load_cloud_file(file.path);
  }
  require_valid(raw.cloud, file.id);

  const auto idx = equalize_indices(raw.cloud, options.num_points, rng);
  s.cloud = normalize_unit_sphere(raw.cloud.gather(idx));
  if (raw.labels) s.parts = raw.labels->gather(idx);
  if (raw.saliency) s.saliency = raw.saliency->gather(idx);
  return s;
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < count; t = next++) {
      try {
        fn(t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(jobs);
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

PreparedDataset prepare_dataset(const Dataset& dataset, const AugmentOptions& options) {
  const std::size_t n = dataset.files.size();
  std::vector<std::optional<PreparedSample>> slots(n);
  std::vector<std::string> failures(n);
  parallel_for(n, options.jobs, [&](std::size_t f) {
    try {
      slots[f] = prepare_sample(dataset.files[f], f, options);
    } catch (const InputError& e) {
      failures[f] = e.what();
    }
  });

  PreparedDataset out;
  out.classes = dataset.classes;
  for (std::size_t f = 0; f < n; ++f) {
    if (!slots[f]) {
      std::cerr << "warning: skipping " << dataset.files[f].id << ": " << failures[f] << "\n";
      out.skipped.push_back({dataset.files[f].id, failures[f]});
      continue;
    }
    if (options.segmentation && !slots[f]->parts)
      throw InputError(dataset.files[f].id + ": segmentation input lacks a per-point 'label' property");
    if (options.policy.mode == MixMode::S && !slots[f]->saliency)
      throw InputError(dataset.files[f].id + ": mode S needs a per-point 'saliency' property");
    out.samples.push_back(std::move(*slots[f]));
  }
  if (out.samples.empty()) throw InputError("no readable samples in dataset");
  return out;
}

std::uint64_t stream_seed(std::uint64_t base_seed, std::size_t epoch, std::size_t sample_index) {
  return mix64(base_seed, epoch, sample_index);
}

std::size_t choose_partner(const AugmentOptions& options, std::size_t num_samples, std::size_t epoch,
                           std::size_t sample_index) {
  if (num_samples < 2) throw InputError("mixing needs at least two samples");
  if (options.pairing == Pairing::RoundRobin)
    return (sample_index + 1 + epoch % (num_samples - 1)) % num_samples;
  RngStream rng(mix64(stream_seed(options.policy.seed, epoch, sample_index), kPartnerTag));
  auto j = static_cast<std::size_t>(rng.uniform_index(num_samples - 1));
  return j >= sample_index ? j + 1 : j;
}

MixedSample augment_one(const PreparedDataset& data, const AugmentOptions& options, std::size_t epoch,
                        std::size_t sample_index) {
  const std::size_t classes = data.classes.size();
  const PreparedSample& a = data.samples.at(sample_index);
  const LabelDistribution ya = LabelDistribution::one_hot(a.class_index, classes);
  RngStream rng(stream_seed(options.policy.seed, epoch, sample_index));

  const bool can_pair = data.samples.size() >= 2;
  const std::size_t partner = can_pair ? choose_partner(options, data.samples.size(), epoch, sample_index)
                                       : sample_index;
  const PreparedSample& b = data.samples[partner];
  const LabelDistribution yb = LabelDistribution::one_hot(b.class_index, classes);

  const PartLabels* pa = options.segmentation ? &*a.parts : nullptr;
  const PartLabels* pb = options.segmentation ? &*b.parts : nullptr;
  const SaliencyWeights* sal = a.saliency ? &*a.saliency : nullptr;
  MixedSample s = pointcutmix(MixInput{a.cloud, ya, pa, sal}, MixInput{b.cloud, yb, pb}, options.policy, rng,
                              options.solver);
  if (s.mixed && !can_pair) throw InputError("mixing needs at least two samples");
  s.source_a = a.id;
  if (s.mixed) s.source_b = b.id;
  return s;
}

fs::path output_relpath(const PreparedDataset& data, std::size_t epoch, std::size_t sample_index) {
  const PreparedSample& a = data.samples.at(sample_index);
  char name[64];
  std::snprintf(name, sizeof name, "epoch_%03zu", epoch);
  const fs::path stem = fs::path(a.id).filename().stem();
  char file[32];
  std::snprintf(file, sizeof file, "%05zu_", sample_index);
  return fs::path(name) / data.classes[a.class_index] / (std::string(file) + stem.string() + ".ply");
}

AugmentSummary run_augment(const fs::path& dataset_dir, const fs::path& out_dir, const AugmentOptions& options) {
  options.policy.validate();
  options.solver.validate();
  if (options.num_points < 1) throw InputError("--num-points must be >= 1");
  if (options.epochs < 1) throw InputError("--epochs must be >= 1");

  const Dataset dataset = scan_dataset(dataset_dir);
  const PreparedDataset data = prepare_dataset(dataset, options);
  if (data.samples.size() < 2 && options.policy.rho > 0.0)
    throw InputError("mixing needs at least two readable samples (or --rho 0)");

  const std::size_t m = data.samples.size();
  const std::size_t tasks = m * options.epochs;
  std::vector<Json> records(tasks);
  std::vector<char> mixed(tasks, 0);
  fs::create_directories(out_dir);

  parallel_for(tasks, options.jobs, [&](std::size_t t) {
    const std::size_t epoch = t / m, i = t % m;
    const MixedSample s = augment_one(data, options, epoch, i);
    const fs::path rel = output_relpath(data, epoch, i);
    write_text_file(out_dir / rel, write_ply(s.cloud, s.part_labels ? &*s.part_labels : nullptr));
    Json rec = sample_record(s, data.classes, rel.generic_string(), stream_seed(options.policy.seed, epoch, i));
    Json ordered;
    ordered["epoch"] = epoch;
    ordered["sample_index"] = i;
    for (auto& [k, v] : rec.items()) ordered[k] = v;
    records[t] = std::move(ordered);
    mixed[t] = s.mixed;
  });

  Json manifest;
  manifest["format"] = "pointcutmix-manifest";
  manifest["version"] = 1;
  manifest["command"] = options.segmentation ? "segment-augment" : "augment";
  manifest["seed"] = options.policy.seed;
  manifest["mode"] = std::string(to_string(options.policy.mode));
  manifest["beta"] = options.policy.beta;
  manifest["rho"] = options.policy.rho;
  manifest["num_points"] = options.num_points;
  manifest["epochs"] = options.epochs;
  manifest["pairs"] = std::string(to_string(options.pairing));
  manifest["classes"] = data.classes;
  Json sources = Json::array();
  for (const auto& s : data.samples)
    sources.push_back({{"id", s.id},
                       {"class", data.classes[s.class_index]},
                       {"class_index", s.class_index},
                       {"file_index", s.file_index},
                       {"prepare_seed", s.prepare_seed}});
  manifest["sources"] = std::move(sources);
  Json skipped = Json::array();
  for (const auto& s : data.skipped) skipped.push_back({{"id", s.id}, {"reason", s.reason}});
  manifest["skipped"] = std::move(skipped);

  AugmentSummary summary;
  summary.outputs = tasks;
  summary.skipped = data.skipped.size();
  for (char c : mixed) summary.mixed += c ? 1 : 0;
  manifest["summary"] = {{"outputs", summary.outputs},
                         {"mixed", summary.mixed},
                         {"unmixed", summary.outputs - summary.mixed},
                         {"skipped", summary.skipped}};
  manifest["entries"] = std::move(records);
  write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return summary;
}

}  // namespace pcm
