#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slotkit/geometry.hpp"
#include "slotkit/image.hpp"
#include "slotkit/placement.hpp"
#include "slotkit/scene.hpp"

namespace slotkit {

/// Symmetric Chamfer distance in m^2:
///   0.5 * (mean_p min_q |p-q|^2 + mean_q min_p |p-q|^2).
double chamfer(const PointCloud& p, const PointCloud& q);

/// Resamples a cloud to exactly n points. Larger clouds are sampled uniformly
/// without replacement; a cloud of exactly n points is returned unchanged;
/// smaller clouds keep every point and draw the remainder with replacement.
std::vector<Vec3> resample(const PointCloud& cloud, std::size_t n, std::uint64_t seed);

/// Earth Mover's distance in m: both clouds resampled to `subsample` points
/// with the same seed, then (1/N) * min over bijections of the summed
/// Euclidean matching cost, solved exactly.
double emd(const PointCloud& p, const PointCloud& q, std::size_t subsample, std::uint64_t seed);

struct Assignment {
  std::vector<std::size_t> col_for_row;
  double total_cost = 0.0;  // summed in row order
};

/// Minimum-cost perfect matching for an n x n row-major cost matrix
/// (Hungarian algorithm with potentials, O(n^3)).
Assignment solve_assignment(std::span<const double> cost, std::size_t n);

struct ScoringConfig {
  std::size_t emd_subsample = 256;
  std::uint64_t emd_seed = 0;
  int dilation_radius = 0;
  double ap_iou_threshold = 0.5;

  bool operator==(const ScoringConfig&) const = default;
};

struct MultiSlotScore {
  double mean_iou = 0.0;
  double average_precision = 0.0;
  std::size_t matched = 0;
  std::size_t predicted = 0;
  std::size_t annotated = 0;

  bool operator==(const MultiSlotScore&) const = default;
};

struct SceneScore {
  std::string scene;
  double obj_iou = 0.0;
  double slot_iou = 0.0;
  double transform_precision = 0.0;
  double chamfer = 0.0;
  double emd = 0.0;
  bool used_fallback = false;
  std::optional<MultiSlotScore> multislot;

  bool operator==(const SceneScore&) const = default;
};

/// Scores one prediction against the scene's annotations. A missing or
/// fallback exact-slot placement is scored as an empty mask with the
/// identity transform. Throws InputError when the scene lacks ground truth.
SceneScore score_scene(const ScenePrediction& prediction, const ScenePair& scene,
                       const ScoringConfig& config, std::string scene_name = {});

/// Greedy one-to-one matching by descending IoU (pairs with IoU > 0 only).
/// Mean IoU counts unmatched predictions and annotations as 0. AP ranks
/// predictions in the given order and counts a match with IoU >= threshold
/// as a true positive (all-point interpolated precision/recall area).
MultiSlotScore score_multislot(std::span<const BinaryMask> predicted,
                               std::span<const BinaryMask> annotated,
                               double iou_threshold = 0.5);

struct AggregateScores {
  double obj_iou = 0.0;
  double slot_iou = 0.0;
  double transform_precision = 0.0;
  double chamfer = 0.0;
  double emd = 0.0;
  double fallback_rate = 0.0;
  std::optional<double> multislot_mean_iou;
  std::optional<double> multislot_ap;

  bool operator==(const AggregateScores&) const = default;
};

struct EvaluationReport {
  std::vector<SceneScore> scenes;
  AggregateScores aggregate;
  std::vector<std::string> skipped;  // scene names skipped for missing ground truth
  ScoringConfig config;
};

/// Arithmetic means over the scene records, in record order.
AggregateScores aggregate_scores(std::span<const SceneScore> scenes);

}  // namespace slotkit
