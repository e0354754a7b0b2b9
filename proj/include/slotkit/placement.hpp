#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slotkit/geometry.hpp"
#include "slotkit/registration.hpp"
#include "slotkit/scene.hpp"

namespace slotkit {

inline constexpr std::string_view kStageObjectRobotToHuman = "object_robot_to_human";
inline constexpr std::string_view kStageObjectHumanMotion = "object_human_motion";
inline constexpr std::string_view kStageSlotHumanToRobot = "slot_human_to_robot";

/// The three stage transforms behind one placement.
struct TransformTriplet {
  RigidTransform obj_robot_to_human;   // object, robot view -> human start view
  RigidTransform obj_human_motion;     // object, human start -> human end
  RigidTransform slot_human_to_robot;  // demonstrated slot -> robot slot i
};

/// slot_human_to_robot * obj_human_motion * obj_robot_to_human: maps the object
/// at its robot-view start pose onto robot slot i.
RigidTransform chain(const TransformTriplet& triplet);

enum class StageStatus { kOk, kInsufficientData, kNoConsensus };
std::string_view to_string(StageStatus s);

struct StageDiagnostics {
  std::string stage;
  StageStatus status = StageStatus::kOk;
  std::size_t pairs_total = 0;
  std::size_t pairs_dropped = 0;  // invalid depth on either endpoint
  std::optional<RegistrationResult> result;
  std::string message;

  bool ok() const { return status == StageStatus::kOk; }
  bool operator==(const StageDiagnostics&) const = default;
};

struct SlotPlacement {
  std::size_t slot_index = 0;
  /// Robot-view slot mask; empty for a fallback.
  BinaryMask slot_mask;
  /// Identity for a fallback.
  RigidTransform transform;
  StageDiagnostics object_robot_to_human;
  StageDiagnostics object_human_motion;
  StageDiagnostics slot_human_to_robot;
  bool fallback = false;
  std::optional<std::string> failed_stage;

  bool operator==(const SlotPlacement&) const = default;
};

struct LiftedCorrespondences {
  std::vector<PointPair> pairs;
  std::size_t dropped = 0;
};

/// Lifts pixel correspondences to 3D using nearest-pixel depth lookup in
/// each view; pairs with invalid depth on either side are dropped. Point-form
/// sets pass through unchanged.
LiftedCorrespondences lift_correspondences(const CorrespondenceSet& set, const View& src,
                                           const View& dst);

/// Runs the three registration stages and chains them per slot. Object
/// stages are estimated once and shared by all slots. Any stage failing for
/// lack of consensus or data yields a fallback placement.
std::vector<SlotPlacement> compute_placements(const ScenePair& scene, const RansacParams& ransac);

/// Everything a method outputs for one scene.
struct ScenePrediction {
  /// Predicted robot-view object mask; all-zero when the method produced
  /// nothing.
  BinaryMask object_mask;
  std::vector<SlotPlacement> placements;

  bool has_output() const;
  bool operator==(const ScenePrediction&) const = default;
};

/// compute_placements plus the scene-level object mask. When every slot falls
/// back the scene counts as "no output" and the object mask is empty.
ScenePrediction predict_scene(const ScenePair& scene, const RansacParams& ransac);

}  // namespace slotkit
