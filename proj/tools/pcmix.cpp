// pcmix: point cloud mixing from the command line.
//
//   pcmix emd A B [--equalize N] [--dump-assignment FILE]
//   pcmix mix A LABEL_A B LABEL_B --mode k --beta 1 --seed 1 --out mixed.ply
//   pcmix augment DATASET --out DIR [--rho 1] [--jobs 4] ...
//   pcmix segment-augment DATASET --out DIR [--rho 0.5] ...
//   pcmix sample MESH.off --num-points 1024 --normalize --out cloud.ply
//
// Exit codes: 0 success, 1 input error, 2 internal error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pcm/assignment.hpp"
#include "pcm/augment.hpp"
#include "pcm/error.hpp"
#include "pcm/ingest.hpp"
#include "pcm/manifest.hpp"
#include "pcm/mixer.hpp"

namespace fs = std::filesystem;
using namespace pcm;

namespace {

struct EmdArgs {
  std::string a, b;
  std::optional<std::size_t> equalize;
  std::string dump;
  std::uint64_t seed = 0;
  SolverConfig solver;
};

struct MixArgs {
  std::string a, b;
  std::size_t label_a = 0, label_b = 0;
  std::string mode = "k";
  double beta = 1.0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> num_points;
  std::optional<std::size_t> num_classes;
  std::optional<double> lambda;
  std::string saliency;
  std::string out;
  bool normalize = false;
  SolverConfig solver;
};

struct AugmentArgs {
  std::string dataset, out;
  std::string mode = "k";
  std::string pairs = "random";
  AugmentOptions options;
};

struct SampleArgs {
  std::string mesh, out;
  std::size_t num_points = 1024;
  std::uint64_t seed = 0;
  bool normalize = false;
};

void add_solver_flags(CLI::App* cmd, SolverConfig& s) {
  cmd->add_option("--exact-threshold", s.exact_threshold, "Solve exactly up to this many points")
      ->capture_default_str();
  cmd->add_option("--epsilon", s.epsilon_final, "Final auction epsilon")->capture_default_str();
}

int run_emd(const EmdArgs& args) {
  PointCloud a = load_cloud_file(args.a).cloud;
  PointCloud b = load_cloud_file(args.b).cloud;
  if (args.equalize) {
    RngStream rng(args.seed);
    a = equalize(a, *args.equalize, rng);
    b = equalize(b, *args.equalize, rng);
  } else if (a.size() != b.size()) {
    throw InputError("clouds differ in size (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                     "); pass --equalize N");
  }
  const Assignment asg = optimal_assignment(a, b, args.solver);
  std::printf("%.6f\n", asg.total_cost / static_cast<double>(a.size()));
  if (!args.dump.empty()) {
    std::string text;
    for (auto j : asg.mapping) text += std::to_string(j) + "\n";
    write_text_file(args.dump, text);
  }
  return 0;
}

int run_mix(const MixArgs& args) {
  const MixMode mode = parse_mix_mode(args.mode);
  PlyCloud a = load_cloud_file(args.a);
  PlyCloud b = load_cloud_file(args.b);
  require_valid(a.cloud, args.a);
  require_valid(b.cloud, args.b);

  if (!args.saliency.empty()) a.saliency = load_saliency_file(args.saliency);
  if (mode == MixMode::S && !a.saliency)
    throw InputError("mode s needs --saliency (or a 'saliency' property in the first cloud)");
  if (a.saliency && a.saliency->size() != a.cloud.size())
    throw InputError("saliency has " + std::to_string(a.saliency->size()) + " values for " +
                     std::to_string(a.cloud.size()) + " points");

  if (args.num_points) {
    for (auto [cloud, tag] : {std::pair{&a, 0ULL}, std::pair{&b, 1ULL}}) {
      RngStream rng(mix64(args.seed, kPrepareTag, tag));
      const auto idx = equalize_indices(cloud->cloud, *args.num_points, rng);
      cloud->cloud = cloud->cloud.gather(idx);
      if (cloud->labels) cloud->labels = cloud->labels->gather(idx);
      if (cloud->saliency) cloud->saliency = cloud->saliency->gather(idx);
    }
  } else if (a.cloud.size() != b.cloud.size()) {
    throw InputError("clouds differ in size (" + std::to_string(a.cloud.size()) + " vs " +
                     std::to_string(b.cloud.size()) + "); pass --num-points N");
  }
  if (args.normalize) {
    a.cloud = normalize_unit_sphere(a.cloud);
    b.cloud = normalize_unit_sphere(b.cloud);
  }

  const std::size_t classes = args.num_classes.value_or(std::max(args.label_a, args.label_b) + 1);
  const auto ya = LabelDistribution::one_hot(args.label_a, classes);
  const auto yb = LabelDistribution::one_hot(args.label_b, classes);
  const bool segmentation = a.labels && b.labels;

  const MixInput in_a{a.cloud, ya, segmentation ? &*a.labels : nullptr, a.saliency ? &*a.saliency : nullptr};
  const MixInput in_b{b.cloud, yb, segmentation ? &*b.labels : nullptr};
  RngStream rng(args.seed);
  MixedSample s;
  if (args.lambda) {
    s = pointcutmix_fixed_lambda(in_a, in_b, mode, *args.lambda, rng, args.solver);
  } else {
    AugmentPolicy policy{args.beta, 1.0, mode, args.seed};
    s = pointcutmix(in_a, in_b, policy, rng, args.solver);
  }
  s.source_a = args.a;
  s.source_b = args.b;

  write_text_file(args.out, write_ply(s.cloud, s.part_labels ? &*s.part_labels : nullptr));
  Json record = sample_record(s, {}, fs::path(args.out).filename().string(), args.seed);
  record["lambda_source"] = args.lambda ? "fixed" : "beta";
  record["beta"] = args.beta;
  write_text_file(args.out + ".json", record.dump(2) + "\n");
  std::printf("wrote %s: n_kept=%zu/%zu lambda_effective=%.6f\n", args.out.c_str(), s.mask.n_kept(), s.cloud.size(),
              s.lambda_effective());
  return 0;
}

int run_augment(AugmentArgs& args) {
  args.options.policy.mode = parse_mix_mode(args.mode);
  args.options.pairing = parse_pairing(args.pairs);
  const auto summary = pcm::run_augment(args.dataset, args.out, args.options);
  std::printf("wrote %zu samples (%zu mixed, %zu skipped inputs) to %s\n", summary.outputs, summary.mixed,
              summary.skipped, args.out.c_str());
  return 0;
}

int run_sample(const SampleArgs& args) {
  const TriangleMesh mesh = parse_off(read_text_file(args.mesh));
  RngStream rng(args.seed);
  PointCloud cloud = sample_surface(mesh, args.num_points, rng);
  if (args.normalize) cloud = normalize_unit_sphere(cloud);
  save_cloud_file(args.out, cloud);
  return 0;
}

void add_augment_command(CLI::App& app, const char* name, const char* help, AugmentArgs& args, double rho_default,
                         bool segmentation) {
  auto* cmd = app.add_subcommand(name, help);
  args.options.policy.rho = rho_default;
  args.options.segmentation = segmentation;
  cmd->add_option("dataset", args.dataset, "Class-per-folder dataset directory")->required();
  cmd->add_option("--out", args.out, "Output directory")->required();
  cmd->add_option("--mode", args.mode, "Replacement strategy r|k|s")->capture_default_str();
  cmd->add_option("--beta", args.options.policy.beta, "Beta(beta, beta) shape")->capture_default_str();
  cmd->add_option("--rho", args.options.policy.rho, "Per-sample mixing probability")->capture_default_str();
  cmd->add_option("--seed", args.options.policy.seed, "Base seed")->capture_default_str();
  cmd->add_option("--num-points", args.options.num_points, "Points per cloud")->capture_default_str();
  cmd->add_option("--epochs", args.options.epochs, "Augmented copies of the dataset")->capture_default_str();
  cmd->add_option("--pairs", args.pairs, "Partner choice random|roundrobin")->capture_default_str();
  cmd->add_option("--jobs", args.options.jobs, "Worker threads")->capture_default_str();
  add_solver_flags(cmd, args.options.solver);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pcmix: EMD-aligned cut-and-paste mixing for point clouds"};
  app.require_subcommand(1);

  EmdArgs emd_args;
  auto* emd_cmd = app.add_subcommand("emd", "Earth mover's distance between two clouds");
  emd_cmd->add_option("a", emd_args.a)->required();
  emd_cmd->add_option("b", emd_args.b)->required();
  emd_cmd->add_option("--equalize", emd_args.equalize, "Resample both clouds to N points first");
  emd_cmd->add_option("--dump-assignment", emd_args.dump, "Write the assignment, one index per line");
  emd_cmd->add_option("--seed", emd_args.seed, "Seed for --equalize")->capture_default_str();
  add_solver_flags(emd_cmd, emd_args.solver);

  MixArgs mix_args;
  auto* mix_cmd = app.add_subcommand("mix", "Mix two labelled clouds into one sample");
  mix_cmd->add_option("a", mix_args.a)->required();
  mix_cmd->add_option("label_a", mix_args.label_a)->required();
  mix_cmd->add_option("b", mix_args.b)->required();
  mix_cmd->add_option("label_b", mix_args.label_b)->required();
  mix_cmd->add_option("--mode", mix_args.mode, "Replacement strategy r|k|s")->capture_default_str();
  mix_cmd->add_option("--beta", mix_args.beta, "Beta(beta, beta) shape")->capture_default_str();
  mix_cmd->add_option("--seed", mix_args.seed)->capture_default_str();
  mix_cmd->add_option("--num-points", mix_args.num_points, "Resample both clouds to N points");
  mix_cmd->add_option("--num-classes", mix_args.num_classes, "Class count C (default: max label + 1)");
  mix_cmd->add_option("--lambda", mix_args.lambda, "Fixed kept ratio instead of a Beta draw");
  mix_cmd->add_option("--saliency", mix_args.saliency, "Saliency for the first cloud (PLY or one value per line)");
  mix_cmd->add_flag("--normalize", mix_args.normalize, "Unit-sphere normalize both inputs");
  mix_cmd->add_option("--out", mix_args.out, "Output PLY")->required();
  add_solver_flags(mix_cmd, mix_args.solver);

  AugmentArgs aug_args, seg_args;
  add_augment_command(app, "augment", "Emit a mixed classification dataset", aug_args, 1.0, false);
  add_augment_command(app, "segment-augment", "Emit a mixed part-segmentation dataset", seg_args, 0.5, true);

  SampleArgs sample_args;
  auto* sample_cmd = app.add_subcommand("sample", "Sample a point cloud from an OFF mesh surface");
  sample_cmd->add_option("mesh", sample_args.mesh)->required();
  sample_cmd->add_option("--num-points", sample_args.num_points)->capture_default_str();
  sample_cmd->add_option("--seed", sample_args.seed)->capture_default_str();
  sample_cmd->add_flag("--normalize", sample_args.normalize);
  sample_cmd->add_option("--out", sample_args.out, "Output .ply or .xyz")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*emd_cmd) return run_emd(emd_args);
    if (*mix_cmd) return run_mix(mix_args);
    if (app.got_subcommand("augment")) return run_augment(aug_args);
    if (app.got_subcommand("segment-augment")) return run_augment(seg_args);
    if (*sample_cmd) return run_sample(sample_args);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
