#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <vector>

#include "slotkit/geometry.hpp"
#include "slotkit/image.hpp"
#include "slotkit/registration.hpp"

namespace slotkit::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// Decoded PNG samples, row-major, channels interleaved.
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 0;   // 1 gray, 2 gray+alpha, 3 rgb, 4 rgba
  int bit_depth = 0;  // 8 or 16
  std::vector<std::uint16_t> samples;
};

RawImage read_png(const fs::path& path);

/// 8-bit gray PNG; RGB(A) inputs are converted with BT.601 luma.
GrayImage read_gray_png(const fs::path& path);
void write_gray_png(const fs::path& path, const GrayImage& image);

/// 8-bit PNG, 255 = set. On read any value >= 128 counts as set.
BinaryMask read_mask_png(const fs::path& path);
void write_mask_png(const fs::path& path, const BinaryMask& mask);

/// 16-bit PNG holding millimeters; converted to/from meters.
DepthImage read_depth_png(const fs::path& path);
void write_depth_png(const fs::path& path, const DepthImage& depth);

json read_json(const fs::path& path);
/// Pretty-printed with a trailing newline.
void write_json(const fs::path& path, const json& j);

json to_json(const CameraIntrinsics& k);
CameraIntrinsics intrinsics_from_json(const json& j);

/// {"rotation": [9 numbers row-major], "translation": [3 numbers]}
json to_json(const RigidTransform& t);
RigidTransform transform_from_json(const json& j);

/// {"source_view", "target_view", "form": "pixel"|"point", "pairs": [{src, dst}]}
json to_json(const CorrespondenceSet& set);
CorrespondenceSet correspondences_from_json(const json& j);

json to_json(const RansacParams& p);
RansacParams ransac_from_json(const json& j, RansacParams defaults = {});

json to_json(const RegistrationResult& r);

/// Row-major run lengths, starting with a run of unset pixels.
json mask_to_rle(const BinaryMask& mask);
BinaryMask mask_from_rle(const json& j);

/// ASCII PLY, vertices only, 17 significant digits.
void write_ply(const fs::path& path, const PointCloud& cloud);
PointCloud read_ply(const fs::path& path);

}  // namespace slotkit::io
