#include "slotkit/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "slotkit/error.hpp"
#include "slotkit/kernels.hpp"
#include "slotkit/masks.hpp"

namespace slotkit {

namespace {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double chamfer(const PointCloud& p, const PointCloud& q) {
  if (p.empty() || q.empty()) throw InputError("chamfer: both clouds must be non-empty");
  const double pq = mean(kernels::nearest_sq_distances(p.points, q.points));
  const double qp = mean(kernels::nearest_sq_distances(q.points, p.points));
  return 0.5 * (pq + qp);
}

std::vector<Vec3> resample(const PointCloud& cloud, std::size_t n, std::uint64_t seed) {
  if (cloud.empty()) throw InputError("resample: cloud is empty");
  if (n == 0) throw InputError("resample: subsample size must be >= 1");
  const std::size_t m = cloud.size();
  if (m == n) return cloud.points;

  std::mt19937_64 rng(seed);
  std::vector<Vec3> out;
  out.reserve(n);
  if (m > n) {
    // Partial Fisher-Yates over the index range.
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, m - 1);
      std::swap(idx[i], idx[pick(rng)]);
      out.push_back(cloud.points[idx[i]]);
    }
    return out;
  }
  out = cloud.points;
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  while (out.size() < n) out.push_back(cloud.points[pick(rng)]);
  return out;
}

Assignment solve_assignment(std::span<const double> cost, std::size_t n) {
  if (cost.size() != n * n) throw InputError("assignment: cost matrix must be n x n");
  Assignment out;
  if (n == 0) return out;

  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is a virtual start column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> row_of_col(n + 1, 0), way(n + 1, 0);
  std::vector<double> minv(n + 1);
  std::vector<char> used(n + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    row_of_col[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of_col[j0];
      double delta = inf;
      std::size_t j1 = 0;
      const double* row = cost.data() + (i0 - 1) * n;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = row[j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  out.col_for_row.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.col_for_row[row_of_col[j] - 1] = j - 1;
  for (std::size_t i = 0; i < n; ++i) out.total_cost += cost[i * n + out.col_for_row[i]];
  return out;
}

double emd(const PointCloud& p, const PointCloud& q, std::size_t subsample, std::uint64_t seed) {
  if (p.empty() || q.empty()) throw InputError("emd: both clouds must be non-empty");
  if (subsample == 0) throw InputError("emd: subsample must be >= 1");
  const std::vector<Vec3> a = resample(p, subsample, seed);
  const std::vector<Vec3> b = resample(q, subsample, seed);
  const std::vector<double> cost = kernels::distance_matrix(a, b);
  const Assignment best = solve_assignment(cost, subsample);
  return best.total_cost / static_cast<double>(subsample);
}

MultiSlotScore score_multislot(std::span<const BinaryMask> predicted,
                               std::span<const BinaryMask> annotated, double iou_threshold) {
  MultiSlotScore s;
  s.predicted = predicted.size();
  s.annotated = annotated.size();
  if (predicted.empty() && annotated.empty()) {
    s.mean_iou = 1.0;
    s.average_precision = 1.0;
    return s;
  }

  struct Candidate {
    double iou;
    std::size_t pred;
    std::size_t gt;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    for (std::size_t j = 0; j < annotated.size(); ++j) {
      const double v = iou(predicted[i], annotated[j]);
      if (v > 0.0) cands.push_back({v, i, j});
    }
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.iou > b.iou; });

  std::vector<double> pred_iou(predicted.size(), 0.0);
  std::vector<char> pred_used(predicted.size(), 0), gt_used(annotated.size(), 0);
  double matched_sum = 0.0;
  for (const auto& c : cands) {
    if (pred_used[c.pred] || gt_used[c.gt]) continue;
    pred_used[c.pred] = gt_used[c.gt] = 1;
    pred_iou[c.pred] = c.iou;
    matched_sum += c.iou;
    ++s.matched;
  }
  const std::size_t denom = s.matched + (s.predicted - s.matched) + (s.annotated - s.matched);
  s.mean_iou = matched_sum / static_cast<double>(denom);

  if (annotated.empty()) return s;  // AP undefined without annotations; report 0
  double ap = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0;
  std::vector<double> precisions, recalls;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (pred_used[i] && pred_iou[i] >= iou_threshold) ++tp;
    precisions.push_back(static_cast<double>(tp) / static_cast<double>(i + 1));
    recalls.push_back(static_cast<double>(tp) / static_cast<double>(annotated.size()));
  }
  // Interpolated precision: max precision at any rank with recall >= r.
  for (std::size_t i = precisions.size(); i-- > 1;) {
    precisions[i - 1] = std::max(precisions[i - 1], precisions[i]);
  }
  for (std::size_t i = 0; i < recalls.size(); ++i) {
    ap += (recalls[i] - prev_recall) * precisions[i];
    prev_recall = recalls[i];
  }
  s.average_precision = ap;
  return s;
}

SceneScore score_scene(const ScenePrediction& prediction, const ScenePair& scene,
                       const ScoringConfig& config, std::string scene_name) {
  if (!scene.ground_truth) throw InputError("score_scene: scene has no ground truth");
  const GroundTruth& gt = *scene.ground_truth;
  const int w = scene.robot.depth.width();
  const int h = scene.robot.depth.height();
  const BinaryMask empty(w, h);

  SceneScore s;
  s.scene = std::move(scene_name);

  const BinaryMask& obj_pred =
      prediction.object_mask.same_shape(empty) ? prediction.object_mask : empty;
  s.obj_iou = iou(obj_pred, scene.object_mask_robot);

  const SlotPlacement* exact = nullptr;
  for (const auto& p : prediction.placements) {
    if (p.slot_index == gt.exact_slot_index && !p.fallback) exact = &p;
  }
  s.used_fallback = exact == nullptr;
  const RigidTransform t = exact ? exact->transform : RigidTransform::identity();
  const BinaryMask& slot_pred =
      exact && exact->slot_mask.same_shape(empty) ? exact->slot_mask : empty;
  s.slot_iou = iou(slot_pred, scene.slot_masks_robot[gt.exact_slot_index]);

  const PointCloud start = lift_depth(scene.robot.depth, scene.robot.intrinsics,
                                      &scene.object_mask_robot);
  const PointCloud moved = apply(t, start);
  const Projection proj = project_points(moved, scene.robot.intrinsics);
  const Rasterization raster = rasterize_projection(proj.pixels, w, h, config.dilation_radius);
  s.transform_precision = precision(raster.mask, gt.post_placement_mask);
  s.chamfer = chamfer(moved, gt.post_placement_cloud);
  s.emd = emd(moved, gt.post_placement_cloud, config.emd_subsample, config.emd_seed);

  std::vector<BinaryMask> preds;
  for (const auto& p : prediction.placements) {
    if (!p.fallback) preds.push_back(p.slot_mask);
  }
  s.multislot = score_multislot(preds, scene.slot_masks_robot, config.ap_iou_threshold);
  return s;
}

AggregateScores aggregate_scores(std::span<const SceneScore> scenes) {
  AggregateScores a;
  if (scenes.empty()) return a;
  const double n = static_cast<double>(scenes.size());
  double ms_iou = 0.0;
  double ms_ap = 0.0;
  std::size_t ms_n = 0;
  for (const auto& s : scenes) {
    a.obj_iou += s.obj_iou;
    a.slot_iou += s.slot_iou;
    a.transform_precision += s.transform_precision;
    a.chamfer += s.chamfer;
    a.emd += s.emd;
    a.fallback_rate += s.used_fallback ? 1.0 : 0.0;
    if (s.multislot) {
      ms_iou += s.multislot->mean_iou;
      ms_ap += s.multislot->average_precision;
      ++ms_n;
    }
  }
  a.obj_iou /= n;
  a.slot_iou /= n;
  a.transform_precision /= n;
  a.chamfer /= n;
  a.emd /= n;
  a.fallback_rate /= n;
  if (ms_n > 0) {
    a.multislot_mean_iou = ms_iou / static_cast<double>(ms_n);
    a.multislot_ap = ms_ap / static_cast<double>(ms_n);
  }
  return a;
}

}  // namespace slotkit
