#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "slotkit/geometry.hpp"

namespace slotkit {

struct PixelPair {
  Vec2 src;
  Vec2 dst;
  bool operator==(const PixelPair&) const = default;
};

struct PointPair {
  Vec3 src;
  Vec3 dst;
  bool operator==(const PointPair&) const = default;
};

/// Matches between two labeled views, either as pixels or as 3D points.
struct CorrespondenceSet {
  std::string source_view;
  std::string target_view;
  std::variant<std::vector<PixelPair>, std::vector<PointPair>> pairs;

  bool is_pixel_form() const { return std::holds_alternative<std::vector<PixelPair>>(pairs); }
  const std::vector<PixelPair>& pixel_pairs() const { return std::get<std::vector<PixelPair>>(pairs); }
  const std::vector<PointPair>& point_pairs() const { return std::get<std::vector<PointPair>>(pairs); }
  std::size_t size() const;

  bool operator==(const CorrespondenceSet&) const = default;
};

struct RansacParams {
  double inlier_threshold = 0.01;  // meters
  std::size_t max_iterations = 1000;
  std::size_t min_inliers = 3;
  double confidence = 0.999;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const RansacParams&) const = default;
};

struct RegistrationResult {
  RigidTransform transform;
  std::vector<std::size_t> inlier_indices;  // sorted, unique
  double rms_inlier_error = 0.0;
  std::size_t iterations_used = 0;

  bool operator==(const RegistrationResult&) const = default;
};

/// Least-squares rigid fit (scale fixed at 1) mapping src onto dst:
/// minimizes sum ||R src_i + t - dst_i||^2 with det(R) = +1.
///
/// Throws InsufficientDataError for fewer than 3 pairs or mismatched sizes,
/// DegenerateConfigurationError when src is collinear.
RigidTransform procrustes_rigid(std::span<const Vec3> src, std::span<const Vec3> dst);
RigidTransform procrustes_rigid(std::span<const PointPair> pairs);

/// Hypothesize-and-verify over minimal 3-pair samples, followed by a
/// Procrustes refit on the best consensus set. Hypotheses are scored in
/// parallel batches; each iteration draws from its own RNG stream derived
/// from (seed, iteration), so the result does not depend on the schedule.
///
/// Throws InsufficientDataError for < 3 pairs and NoConsensusError when the
/// best consensus is smaller than max(3, min_inliers).
RegistrationResult ransac_register(std::span<const PointPair> pairs, const RansacParams& params);

/// Number of iterations needed to draw one all-inlier minimal sample with
/// probability `confidence`, clamped to [1, max_iterations].
std::size_t required_iterations(double inlier_ratio, double confidence, std::size_t max_iterations);

namespace reference {
/// Serial one-hypothesis-at-a-time RANSAC; must match ransac_register exactly.
RegistrationResult ransac_register(std::span<const PointPair> pairs, const RansacParams& params);
}  // namespace reference

}  // namespace slotkit
