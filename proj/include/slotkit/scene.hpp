#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slotkit/geometry.hpp"
#include "slotkit/image.hpp"
#include "slotkit/registration.hpp"

namespace slotkit {

inline constexpr std::string_view kHumanStartView = "human_start";
inline constexpr std::string_view kHumanEndView = "human_end";
inline constexpr std::string_view kRobotView = "robot";

/// One RGB-D observation reduced to depth + grayscale.
struct View {
  DepthImage depth;
  GrayImage gray;
  CameraIntrinsics intrinsics;

  bool operator==(const View&) const = default;
};

/// Indices of correspondences the generator replaced with outliers.
struct OutlierFlags {
  std::vector<std::size_t> object_robot_to_human;
  std::vector<std::size_t> object_human_motion;
  std::vector<std::vector<std::size_t>> slot_human_to_robot;

  bool operator==(const OutlierFlags&) const = default;
};

struct GroundTruth {
  /// Placement transform per robot slot, robot camera frame.
  std::vector<RigidTransform> placements;
  RigidTransform object_robot_to_human;
  RigidTransform object_human_motion;
  std::vector<RigidTransform> slot_human_to_robot;
  /// Robot slot that corresponds to the demonstrated slot.
  std::size_t exact_slot_index = 0;
  /// Object cloud (robot camera frame) after placement into the exact slot.
  PointCloud post_placement_cloud;
  /// Robot-view object mask after placement into the exact slot.
  BinaryMask post_placement_mask;
  OutlierFlags outliers;

  bool operator==(const GroundTruth&) const = default;
};

/// A benchmark instance: human start/end frames, the robot view, upstream
/// masks and correspondences, and optional annotations.
struct ScenePair {
  View human_start;
  View human_end;
  View robot;

  BinaryMask object_mask_human_start;
  BinaryMask object_mask_human_end;
  BinaryMask object_mask_robot;
  BinaryMask slot_mask_human_start;
  std::vector<BinaryMask> slot_masks_robot;

  CorrespondenceSet object_robot_to_human;
  CorrespondenceSet object_human_motion;
  std::vector<CorrespondenceSet> slot_human_to_robot;

  std::optional<GroundTruth> ground_truth;

  std::size_t slot_count() const { return slot_masks_robot.size(); }
  /// View by label ("human_start", "human_end", "robot"); InputError otherwise.
  const View& view(std::string_view label) const;

  /// Checks every structural invariant; throws InputError naming the field.
  void validate() const;

  bool operator==(const ScenePair&) const = default;
};

}  // namespace slotkit
