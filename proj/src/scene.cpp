#include "slotkit/scene.hpp"

#include <cmath>
#include <string>

#include "slotkit/error.hpp"

namespace slotkit {

namespace {

std::string dims(int w, int h) { return std::to_string(w) + "x" + std::to_string(h); }

void check_view(const View& v, std::string_view name) {
  const std::string n(name);
  try {
    v.intrinsics.validate();
  } catch (const InputError& e) {
    throw InputError(n + ".intrinsics: " + e.what());
  }
  const int w = v.intrinsics.width;
  const int h = v.intrinsics.height;
  if (v.depth.width() != w || v.depth.height() != h) {
    throw InputError(n + ".depth: size " + dims(v.depth.width(), v.depth.height()) +
                     " does not match intrinsics " + dims(w, h));
  }
  if (v.gray.width() != w || v.gray.height() != h) {
    throw InputError(n + ".gray: size " + dims(v.gray.width(), v.gray.height()) +
                     " does not match intrinsics " + dims(w, h));
  }
}

void check_mask(const BinaryMask& m, const View& v, const std::string& field) {
  if (m.width() != v.depth.width() || m.height() != v.depth.height()) {
    throw InputError(field + ": size " + dims(m.width(), m.height()) +
                     " does not match its view " + dims(v.depth.width(), v.depth.height()));
  }
}

bool pixel_in_bounds(const Vec2& p, const View& v) {
  if (!p.allFinite()) return false;
  const double u = std::round(p.x());
  const double r = std::round(p.y());
  return u >= 0.0 && r >= 0.0 && u < v.depth.width() && r < v.depth.height();
}

void check_correspondences(const ScenePair& s, const CorrespondenceSet& set,
                           std::string_view want_src, std::string_view want_dst,
                           const std::string& field) {
  if (set.source_view != want_src || set.target_view != want_dst) {
    throw InputError(field + ": expected views " + std::string(want_src) + " -> " +
                     std::string(want_dst) + ", got " + set.source_view + " -> " +
                     set.target_view);
  }
  if (!set.is_pixel_form()) {
    const auto& pairs = set.point_pairs();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (!pairs[i].src.allFinite() || !pairs[i].dst.allFinite()) {
        throw InputError(field + ": pair " + std::to_string(i) + " has non-finite coordinates");
      }
    }
    return;
  }
  const View& src = s.view(want_src);
  const View& dst = s.view(want_dst);
  const auto& pairs = set.pixel_pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!pixel_in_bounds(pairs[i].src, src)) {
      throw InputError(field + ": pair " + std::to_string(i) + " source pixel out of bounds");
    }
    if (!pixel_in_bounds(pairs[i].dst, dst)) {
      throw InputError(field + ": pair " + std::to_string(i) + " target pixel out of bounds");
    }
  }
}

}  // namespace

const View& ScenePair::view(std::string_view label) const {
  if (label == kHumanStartView) return human_start;
  if (label == kHumanEndView) return human_end;
  if (label == kRobotView) return robot;
  throw InputError("unknown view label '" + std::string(label) + "'");
}

void ScenePair::validate() const {
  check_view(human_start, kHumanStartView);
  check_view(human_end, kHumanEndView);
  check_view(robot, kRobotView);

  check_mask(object_mask_human_start, human_start, "masks.object.human_start");
  check_mask(object_mask_human_end, human_end, "masks.object.human_end");
  check_mask(object_mask_robot, robot, "masks.object.robot");
  check_mask(slot_mask_human_start, human_start, "masks.slot.human_start");
  if (slot_masks_robot.empty()) throw InputError("masks.slot.robot: scene needs at least one slot");
  for (std::size_t i = 0; i < slot_masks_robot.size(); ++i) {
    check_mask(slot_masks_robot[i], robot, "masks.slot.robot[" + std::to_string(i) + "]");
  }

  check_correspondences(*this, object_robot_to_human, kRobotView, kHumanStartView,
                        "correspondences.object_robot_to_human");
  check_correspondences(*this, object_human_motion, kHumanStartView, kHumanEndView,
                        "correspondences.object_human_motion");
  if (slot_human_to_robot.size() != slot_masks_robot.size()) {
    throw InputError("correspondences.slot_human_to_robot: " +
                     std::to_string(slot_human_to_robot.size()) + " sets for " +
                     std::to_string(slot_masks_robot.size()) + " slots");
  }
  for (std::size_t i = 0; i < slot_human_to_robot.size(); ++i) {
    check_correspondences(*this, slot_human_to_robot[i], kHumanStartView, kRobotView,
                          "correspondences.slot_human_to_robot[" + std::to_string(i) + "]");
  }

  if (ground_truth) {
    const GroundTruth& gt = *ground_truth;
    if (gt.placements.size() != slot_count()) {
      throw InputError("ground_truth.placements: expected one transform per slot");
    }
    if (gt.slot_human_to_robot.size() != slot_count()) {
      throw InputError("ground_truth.slot_human_to_robot: expected one transform per slot");
    }
    if (gt.exact_slot_index >= slot_count()) {
      throw InputError("ground_truth.exact_slot_index: out of range");
    }
    check_mask(gt.post_placement_mask, robot, "ground_truth.post_placement_mask");
    for (const auto& p : gt.post_placement_cloud.points) {
      if (!p.allFinite()) throw InputError("ground_truth.post_placement_cloud: non-finite point");
    }
  }
}

}  // namespace slotkit
