#include "slotkit/placement.hpp"

#include <initializer_list>
#include <cmath>

#include "slotkit/error.hpp"

namespace slotkit {

namespace {

// Depth at the nearest pixel, or 0 when outside the image.
double nearest_depth(const View& view, const Vec2& px) {
  const double u = std::round(px.x());
  const double v = std::round(px.y());
  if (!(u >= 0.0 && v >= 0.0 && u < view.depth.width() && v < view.depth.height())) return 0.0;
  return view.depth.at(static_cast<int>(u), static_cast<int>(v));
}

StageDiagnostics run_stage(std::string_view stage, const ScenePair& scene,
                           const CorrespondenceSet& set, const RansacParams& ransac) {
  StageDiagnostics d;
  d.stage = std::string(stage);
  d.pairs_total = set.size();
  const LiftedCorrespondences lifted =
      lift_correspondences(set, scene.view(set.source_view), scene.view(set.target_view));
  d.pairs_dropped = lifted.dropped;
  try {
    d.result = ransac_register(lifted.pairs, ransac);
  } catch (const InsufficientDataError& e) {
    d.status = StageStatus::kInsufficientData;
    d.message = e.what();
  } catch (const NoConsensusError& e) {
    d.status = StageStatus::kNoConsensus;
    d.message = e.what();
  }
  return d;
}

}  // namespace

RigidTransform chain(const TransformTriplet& t) {
  return compose(t.slot_human_to_robot, compose(t.obj_human_motion, t.obj_robot_to_human));
}

std::string_view to_string(StageStatus s) {
  switch (s) {
    case StageStatus::kOk:
      return "ok";
    case StageStatus::kInsufficientData:
      return "insufficient_data";
    case StageStatus::kNoConsensus:
      return "no_consensus";
  }
  return "unknown";
}

LiftedCorrespondences lift_correspondences(const CorrespondenceSet& set, const View& src,
                                           const View& dst) {
  LiftedCorrespondences out;
  if (!set.is_pixel_form()) {
    out.pairs = set.point_pairs();
    return out;
  }
  out.pairs.reserve(set.size());
  for (const auto& p : set.pixel_pairs()) {
    const double zs = nearest_depth(src, p.src);
    const double zd = nearest_depth(dst, p.dst);
    if (!(zs > 0.0) || !(zd > 0.0)) {
      ++out.dropped;
      continue;
    }
    out.pairs.push_back({unproject(p.src, zs, src.intrinsics), unproject(p.dst, zd, dst.intrinsics)});
  }
  return out;
}

std::vector<SlotPlacement> compute_placements(const ScenePair& scene, const RansacParams& ransac) {
  ransac.validate();
  scene.validate();

  const StageDiagnostics r2h =
      run_stage(kStageObjectRobotToHuman, scene, scene.object_robot_to_human, ransac);
  const StageDiagnostics motion =
      run_stage(kStageObjectHumanMotion, scene, scene.object_human_motion, ransac);

  std::vector<SlotPlacement> out;
  out.reserve(scene.slot_count());
  for (std::size_t i = 0; i < scene.slot_count(); ++i) {
    SlotPlacement sp;
    sp.slot_index = i;
    sp.object_robot_to_human = r2h;
    sp.object_human_motion = motion;
    sp.slot_human_to_robot =
        run_stage(kStageSlotHumanToRobot, scene, scene.slot_human_to_robot[i], ransac);

    for (const StageDiagnostics* d :
         std::initializer_list<const StageDiagnostics*>{&r2h, &motion, &sp.slot_human_to_robot}) {
      if (!d->ok()) {
        sp.failed_stage = d->stage;
        break;
      }
    }
    if (sp.failed_stage) {
      sp.fallback = true;
      sp.transform = RigidTransform::identity();
      sp.slot_mask = BinaryMask(scene.robot.depth.width(), scene.robot.depth.height());
    } else {
      sp.slot_mask = scene.slot_masks_robot[i];
      sp.transform = chain({r2h.result->transform, motion.result->transform,
                            sp.slot_human_to_robot.result->transform});
    }
    out.push_back(std::move(sp));
  }
  return out;
}

bool ScenePrediction::has_output() const {
  for (const auto& p : placements) {
    if (!p.fallback) return true;
  }
  return false;
}

ScenePrediction predict_scene(const ScenePair& scene, const RansacParams& ransac) {
  ScenePrediction pred;
  pred.placements = compute_placements(scene, ransac);
  pred.object_mask = pred.has_output()
                         ? scene.object_mask_robot
                         : BinaryMask(scene.robot.depth.width(), scene.robot.depth.height());
  return pred;
}

}  // namespace slotkit
