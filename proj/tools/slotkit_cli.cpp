#include <CLI11.hpp>
#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "slotkit/error.hpp"
#include "slotkit/fixtures.hpp"
#include "slotkit/io.hpp"
#include "slotkit/masks.hpp"
#include "slotkit/metrics.hpp"
#include "slotkit/placement.hpp"
#include "slotkit/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace slotkit;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags shared by the commands that take a RunConfig.
struct ConfigFlags {
  std::optional<std::string> config_path;
  CLI::Option* inlier_threshold = nullptr;
  CLI::Option* max_iterations = nullptr;
  CLI::Option* min_inliers = nullptr;
  CLI::Option* confidence = nullptr;
  CLI::Option* ransac_seed = nullptr;
  CLI::Option* diff_threshold = nullptr;
  CLI::Option* emd_subsample = nullptr;
  CLI::Option* emd_seed = nullptr;
  CLI::Option* dilation = nullptr;
  CLI::Option* threads = nullptr;
  RunConfig values;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file (default: $SLOTKIT_CONFIG)");
    inlier_threshold = app->add_option("--inlier-threshold", values.ransac.inlier_threshold, "RANSAC inlier threshold (m)");
    max_iterations = app->add_option("--max-iterations", values.ransac.max_iterations, "RANSAC iteration cap");
    min_inliers = app->add_option("--min-inliers", values.ransac.min_inliers, "Minimum consensus size");
    confidence = app->add_option("--confidence", values.ransac.confidence, "RANSAC early-exit confidence");
    ransac_seed = app->add_option("--ransac-seed", values.ransac.seed, "RANSAC seed");
    diff_threshold = app->add_option("--diff-threshold,--threshold", values.diff_threshold, "Image-difference threshold");
    emd_subsample = app->add_option("--emd-subsample", values.scoring.emd_subsample, "EMD resample size");
    emd_seed = app->add_option("--emd-seed", values.scoring.emd_seed, "EMD resample seed");
    dilation = app->add_option("--dilation", values.scoring.dilation_radius, "Rasterization dilation radius (px)");
    threads = app->add_option("--threads", values.threads, "Scene-level worker threads (0 = default)");
  }

  // Defaults < config file < flags.
  RunConfig resolve() const {
    RunConfig c;
    try {
      c = load_config(config_path ? std::optional<fs::path>(*config_path) : std::nullopt);
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
    const auto set = [](const CLI::Option* o) { return o != nullptr && o->count() > 0; };
    if (set(inlier_threshold)) c.ransac.inlier_threshold = values.ransac.inlier_threshold;
    if (set(max_iterations)) c.ransac.max_iterations = values.ransac.max_iterations;
    if (set(min_inliers)) c.ransac.min_inliers = values.ransac.min_inliers;
    if (set(confidence)) c.ransac.confidence = values.ransac.confidence;
    if (set(ransac_seed)) c.ransac.seed = values.ransac.seed;
    if (set(diff_threshold)) c.diff_threshold = values.diff_threshold;
    if (set(emd_subsample)) c.scoring.emd_subsample = values.scoring.emd_subsample;
    if (set(emd_seed)) c.scoring.emd_seed = values.scoring.emd_seed;
    if (set(dilation)) c.scoring.dilation_radius = values.scoring.dilation_radius;
    if (set(threads)) c.threads = values.threads;
    try {
      c.validate();
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
    if (c.threads > 0) omp_set_num_threads(c.threads);
    return c;
  }
};

std::string scene_name(const fs::path& p) {
  const fs::path dir = fs::is_directory(p) ? p : p.parent_path();
  const auto name = fs::absolute(dir).lexically_normal().filename().string();
  return name.empty() ? fs::absolute(dir).lexically_normal().parent_path().filename().string() : name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

// ---- gen ------------------------------------------------------------------

struct GenArgs {
  SynthParams params;
  std::vector<double> camera_shift;
  std::string out;
  std::size_t count = 1;
  bool composite = false;
};

int run_gen(GenArgs& a) {
  if (!a.camera_shift.empty()) a.params.robot_camera.shift = Vec3(a.camera_shift[0], a.camera_shift[1], a.camera_shift[2]);
  try {
    a.params.validate();
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  const fs::path root(a.out);
  for (std::size_t i = 0; i < a.count; ++i) {
    SynthParams p = a.params;
    p.seed = a.params.seed + i;
    const fs::path dir = a.count == 1 ? root : root / ("scene_" + std::to_string(i));
    const ScenePair scene = generate_scene(p);
    write_scene(scene, dir);
    io::write_json(dir / "generator.json",
                   {{"seed", p.seed},
                    {"slots", p.n_slots},
                    {"spacing", p.slot_spacing},
                    {"points", p.points_per_set},
                    {"sigma", p.noise_sigma},
                    {"outliers", p.outlier_fraction},
                    {"width", p.image_width},
                    {"height", p.image_height},
                    {"camera_yaw", p.robot_camera.yaw},
                    {"camera_shift", {p.robot_camera.shift.x(), p.robot_camera.shift.y(), p.robot_camera.shift.z()}},
                    {"all_outlier_slots", p.all_outlier_slots}});
    if (a.composite) {
      const ChangeComposite c = make_change_composite(p.image_width, p.image_height, p.seed);
      io::write_gray_png(dir / "composite_start.png", c.start);
      io::write_gray_png(dir / "composite_end.png", c.end);
      io::write_mask_png(dir / "composite_gt.png", c.changed);
    }
    std::cout << dir.string() << '\n';
  }
  return 0;
}

// ---- pipeline ---------------------------------------------------------------

struct PipelineArgs {
  std::string scene;
  std::string out;
  ConfigFlags flags;
};

int run_pipeline(PipelineArgs& a) {
  const RunConfig config = a.flags.resolve();
  const ScenePair scene = load_scene(a.scene);
  const ScenePrediction pred = predict_scene(scene, config.ransac);
  io::write_json(a.out, placement_report(pred, scene_name(a.scene), config));
  std::size_t fallbacks = 0;
  for (const auto& p : pred.placements) fallbacks += p.fallback ? 1 : 0;
  std::cout << "slots: " << pred.placements.size() << ", fallbacks: " << fallbacks << '\n';
  return 0;
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::vector<std::string> scenes;
  std::vector<std::string> predictions;
  std::string out;
  std::optional<std::string> csv;
  ConfigFlags flags;
};

int run_evaluate(EvaluateArgs& a) {
  const RunConfig config = a.flags.resolve();
  if (a.scenes.size() != a.predictions.size()) {
    throw UsageError("--scenes and --predictions must list the same number of entries");
  }
  const std::size_t n = a.scenes.size();
  std::vector<std::optional<SceneScore>> scores(n);
  std::vector<std::string> names(n);
  std::vector<std::string> errors(n);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      names[k] = scene_name(a.scenes[k]);
      const ScenePair scene = load_scene(a.scenes[k]);
      if (!scene.ground_truth) continue;
      const ScenePrediction pred = prediction_from_report(io::read_json(a.predictions[k]),
                                                          scene.robot.depth.width(), scene.robot.depth.height());
      scores[k] = score_scene(pred, scene, config.scoring, names[k]);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }

  EvaluationReport report;
  report.config = config.scoring;
  for (std::size_t k = 0; k < n; ++k) {
    if (!errors[k].empty()) throw Error(a.scenes[k] + ": " + errors[k]);
    if (scores[k]) {
      report.scenes.push_back(*scores[k]);
    } else {
      report.skipped.push_back(names[k]);
      std::cerr << "warning: scene '" << names[k] << "' has no ground truth; skipped\n";
    }
  }
  report.aggregate = aggregate_scores(report.scenes);
  io::write_json(a.out, evaluation_report_json(report, config));
  if (a.csv) write_text(*a.csv, evaluation_csv(report));
  const auto& g = report.aggregate;
  std::printf("scenes %zu skipped %zu | Obj %.4f Slot %.4f Prec. %.4f CD %.6g EMD %.6g\n", report.scenes.size(),
              report.skipped.size(), g.obj_iou, g.slot_iou, g.transform_precision, g.chamfer, g.emd);
  return 0;
}

// ---- slot-diff --------------------------------------------------------------

struct SlotDiffArgs {
  std::string start;
  std::string end;
  std::string out;
  std::optional<std::string> gt;
  ConfigFlags flags;
};

int run_slot_diff(SlotDiffArgs& a) {
  const RunConfig config = a.flags.resolve();
  const GrayImage start = io::read_gray_png(a.start);
  const GrayImage end = io::read_gray_png(a.end);
  const BinaryMask mask = diff_slot_mask(start, end, config.diff_threshold);
  io::write_mask_png(a.out, mask);
  json summary = {{"threshold", config.diff_threshold},
                  {"gray_conversion", "BT.601 luma, rounded"},
                  {"cleanup", "none"},
                  {"area", mask.area()}};
  if (a.gt) {
    const BinaryMask gt = io::read_mask_png(*a.gt);
    summary["f1"] = f1_score(mask, gt);
    summary["iou"] = iou(mask, gt);
  }
  std::cout << summary.dump(2) << '\n';
  return 0;
}

// ---- register ---------------------------------------------------------------

struct RegisterArgs {
  std::string correspondences;
  std::optional<std::string> scene;
  std::optional<std::string> out;
  ConfigFlags flags;
};

int run_register(RegisterArgs& a) {
  const RunConfig config = a.flags.resolve();
  const CorrespondenceSet set = io::correspondences_from_json(io::read_json(a.correspondences));
  std::vector<PointPair> pairs;
  std::size_t dropped = 0;
  if (set.is_pixel_form()) {
    if (!a.scene) throw UsageError("pixel-form correspondences need --scene to look up depth");
    const ScenePair scene = load_scene(*a.scene);
    LiftedCorrespondences lifted =
        lift_correspondences(set, scene.view(set.source_view), scene.view(set.target_view));
    pairs = std::move(lifted.pairs);
    dropped = lifted.dropped;
  } else {
    pairs = set.point_pairs();
  }
  json result = {{"source_view", set.source_view},
                 {"target_view", set.target_view},
                 {"pairs", pairs.size()},
                 {"dropped_pairs", dropped},
                 {"config", to_json(config)}};
  try {
    result["result"] = io::to_json(ransac_register(pairs, config.ransac));
    result["status"] = "ok";
  } catch (const NoConsensusError& e) {
    result["status"] = "no_consensus";
    result["best_inliers"] = e.best_inliers();
  } catch (const InsufficientDataError& e) {
    result["status"] = "insufficient_data";
    result["message"] = e.what();
  }
  if (a.out) io::write_json(*a.out, result);
  std::cout << result.dump(2) << '\n';
  return 0;
}

// ---- lift -------------------------------------------------------------------

struct LiftArgs {
  std::string depth;
  std::string intrinsics;
  std::optional<std::string> mask;
  std::string out;
};

int run_lift(LiftArgs& a) {
  const DepthImage depth = io::read_depth_png(a.depth);
  const CameraIntrinsics k = io::intrinsics_from_json(io::read_json(a.intrinsics));
  k.validate();
  if (depth.width() != k.width || depth.height() != k.height) {
    throw InputError("depth raster size does not match the intrinsics");
  }
  std::optional<BinaryMask> mask;
  if (a.mask) mask = io::read_mask_png(*a.mask);
  const PointCloud cloud = lift_depth(depth, k, mask ? &*mask : nullptr);
  io::write_ply(a.out, cloud);
  std::cout << "points: " << cloud.size() << ", invalid: " << count_invalid_depth(depth, mask ? &*mask : nullptr)
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slotkit: slot-level placement toolkit"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate synthetic fixture scenes");
  g->add_option("--seed", gen.params.seed, "Generator seed");
  g->add_option("--slots", gen.params.n_slots, "Slots on the tray")->check(CLI::Range(std::size_t{1}, std::size_t{12}));
  g->add_option("--spacing", gen.params.slot_spacing, "Slot pitch (m)")->check(CLI::Range(0.08, 1.0));
  g->add_option("--points", gen.params.points_per_set, "Correspondences per set")->check(CLI::Range(std::size_t{3}, std::size_t{100000}));
  g->add_option("--sigma", gen.params.noise_sigma, "Target-side noise (m)")->check(CLI::NonNegativeNumber);
  g->add_option("--outliers", gen.params.outlier_fraction, "Outlier fraction in [0, 1)")
      ->check(CLI::Validator(
          [](std::string& s) -> std::string {
            const double v = std::stod(s);
            return v >= 0.0 && v < 1.0 ? std::string() : "must lie in [0, 1)";
          },
          "[0, 1)"));
  g->add_option("--width", gen.params.image_width, "Image width")->check(CLI::Range(16, 8192));
  g->add_option("--height", gen.params.image_height, "Image height")->check(CLI::Range(16, 8192));
  g->add_option("--camera-yaw", gen.params.robot_camera.yaw, "Robot camera yaw offset (rad)");
  g->add_option("--camera-shift", gen.camera_shift, "Robot camera shift x y z (m)")->expected(3);
  g->add_flag("--all-outlier-slots", gen.params.all_outlier_slots, "Replace every slot correspondence by an outlier");
  g->add_option("--count", gen.count, "Number of scenes (seeds seed..seed+count-1)")->check(CLI::Range(std::size_t{1}, std::size_t{10000}));
  g->add_flag("--composite", gen.composite, "Also write an image-difference composite");
  g->add_option("--out", gen.out, "Output directory")->required();

  PipelineArgs pipe;
  auto* p = app.add_subcommand("pipeline", "Compute per-slot placements for a fixture");
  p->add_option("--scene", pipe.scene, "Fixture directory or manifest")->required();
  p->add_option("--out", pipe.out, "Placement report (JSON)")->required();
  pipe.flags.attach(p);

  EvaluateArgs eval;
  auto* e = app.add_subcommand("evaluate", "Score placement reports against fixtures");
  e->add_option("--scenes", eval.scenes, "Fixture directories")->required();
  e->add_option("--predictions", eval.predictions, "Placement reports, same order")->required();
  e->add_option("--out", eval.out, "Evaluation report (JSON)")->required();
  e->add_option("--csv", eval.csv, "Also write a CSV table");
  eval.flags.attach(e);

  SlotDiffArgs diff;
  auto* d = app.add_subcommand("slot-diff", "Image-difference slot baseline");
  d->add_option("--start", diff.start, "Start frame (PNG)")->required();
  d->add_option("--end", diff.end, "End frame (PNG)")->required();
  d->add_option("--out", diff.out, "Output mask (PNG)")->required();
  d->add_option("--gt", diff.gt, "Ground-truth mask for F1/IoU");
  diff.flags.attach(d);

  RegisterArgs reg;
  auto* r = app.add_subcommand("register", "Register one correspondence set");
  r->add_option("--correspondences", reg.correspondences, "Correspondence JSON")->required();
  r->add_option("--scene", reg.scene, "Fixture supplying depth for pixel-form sets");
  r->add_option("--out", reg.out, "Write the result JSON here as well");
  reg.flags.attach(r);

  LiftArgs lift;
  auto* l = app.add_subcommand("lift", "Back-project a depth image to a PLY cloud");
  l->add_option("--depth", lift.depth, "16-bit depth PNG (mm)")->required();
  l->add_option("--intrinsics", lift.intrinsics, "Intrinsics JSON")->required();
  l->add_option("--mask", lift.mask, "Restrict to this mask");
  l->add_option("--out", lift.out, "Output PLY")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? 0 : kExitUsage;
  }

  try {
    if (g->parsed()) return run_gen(gen);
    if (p->parsed()) return run_pipeline(pipe);
    if (e->parsed()) return run_evaluate(eval);
    if (d->parsed()) return run_slot_diff(diff);
    if (r->parsed()) return run_register(reg);
    if (l->parsed()) return run_lift(lift);
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
