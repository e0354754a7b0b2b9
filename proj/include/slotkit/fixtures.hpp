#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>

#include "slotkit/geometry.hpp"
#include "slotkit/image.hpp"
#include "slotkit/scene.hpp"

namespace slotkit {

/// Pose on the table plane: position (m) and heading (rad) about world +z.
struct PlanarPose {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

/// Robot camera relative to the human camera. The robot camera keeps looking
/// straight down so horizontal surfaces stay fronto-parallel; the vertical
/// shift is rounded to whole millimeters.
struct CameraOffset {
  double yaw = 0.3;
  Vec3 shift{0.02, -0.01, 0.05};
};

/// Explicit placement of every rigid body. Drawn from the seed when absent.
struct SceneLayout {
  PlanarPose object_human_start;
  PlanarPose object_robot_start;
  PlanarPose body_human;
  PlanarPose body_robot;
  /// Object pose relative to the slot it is placed in.
  PlanarPose object_in_slot;
};

struct SynthParams {
  std::uint64_t seed = 0;
  std::size_t n_slots = 1;
  double slot_spacing = 0.09;        // lattice pitch (m)
  std::size_t points_per_set = 100;  // correspondences per set
  CameraOffset robot_camera;
  double noise_sigma = 0.0;       // m, applied to target-side points
  double outlier_fraction = 0.0;  // in [0, 1)
  int image_width = 480;
  int image_height = 360;
  /// Replace every slot correspondence with an image-wide uniform outlier.
  bool all_outlier_slots = false;
  std::optional<SceneLayout> layout;

  void validate() const;
};

/// Builds an analytic scene: a tray with `n_slots` recessed slots on a
/// lattice, a stepped block demonstrated going into slot 0, and three
/// ray-cast views. Bit-identical output for identical parameters.
ScenePair generate_scene(const SynthParams& params);

/// The layout generate_scene uses for `params` (explicit or seed-drawn).
SceneLayout resolve_layout(const SynthParams& params);

/// Writes the fixture directory (manifest.json plus rasters and JSON files).
void write_scene(const ScenePair& scene, const std::filesystem::path& dir);

/// Loads and validates a fixture; accepts the directory or its manifest.
/// Throws LoadError naming the offending field or file.
ScenePair load_scene(const std::filesystem::path& path);

inline constexpr int kManifestVersion = 1;

/// Two frames differing only inside a rectangular patch, by at least
/// `min_delta` gray levels.
struct ChangeComposite {
  GrayImage start;
  GrayImage end;
  BinaryMask changed;
};

ChangeComposite make_change_composite(int width, int height, std::uint64_t seed,
                                      int min_delta = 60);

}  // namespace slotkit
