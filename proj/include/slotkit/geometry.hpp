#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "slotkit/image.hpp"

namespace slotkit {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Pinhole camera. Pixel (u, v) integer coordinates address pixel centers.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  /// Throws InputError when fx, fy <= 0 or the principal point is outside
  /// the image.
  void validate() const;
  bool operator==(const CameraIntrinsics&) const = default;
};

/// Per-pixel depth in meters; 0.0 marks an invalid pixel.
class DepthImage {
 public:
  DepthImage() = default;
  DepthImage(int width, int height);
  DepthImage(int width, int height, std::vector<double> meters);

  int width() const { return width_; }
  int height() const { return height_; }
  double at(int u, int v) const { return meters_[index(u, v)]; }
  void set(int u, int v, double meters) { meters_[index(u, v)] = meters; }
  bool valid(int u, int v) const { return at(u, v) > 0.0; }
  std::span<const double> values() const { return meters_; }

  bool operator==(const DepthImage&) const = default;

 private:
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(u);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> meters_;
};

/// Element of SE(3). Construction validates orthonormality and det = +1
/// within 1e-9.
class RigidTransform {
 public:
  RigidTransform();
  RigidTransform(const Mat3& rotation, const Vec3& translation);

  static RigidTransform identity() { return RigidTransform(); }
  static RigidTransform from_matrix(const Mat4& m);
  static RigidTransform translation_only(const Vec3& t);
  /// Rotation of `angle` radians about `axis` (normalized internally).
  static RigidTransform from_axis_angle(const Vec3& axis, double angle,
                                        const Vec3& translation = Vec3::Zero());

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  Mat4 matrix() const;

  Vec3 operator()(const Vec3& p) const { return rotation_ * p + translation_; }

  bool operator==(const RigidTransform&) const = default;

 private:
  struct Unchecked {};
  RigidTransform(Unchecked, const Mat3& rotation, const Vec3& translation)
      : rotation_(rotation), translation_(translation) {}
  friend RigidTransform compose(const RigidTransform&, const RigidTransform&);
  friend RigidTransform inverse(const RigidTransform&);

  Mat3 rotation_;
  Vec3 translation_;
};

/// (a ∘ b)(p) = a(b(p)). Rotation drift above 1e-12 is projected back onto
/// SO(3).
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform inverse(const RigidTransform& t);
inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
  return compose(a, b);
}

/// Largest elementwise deviation of RᵀR from identity.
double orthonormality_residual(const Mat3& r);
/// Nearest rotation in Frobenius norm (polar factor, det forced to +1).
Mat3 nearest_rotation(const Mat3& m);
/// Geodesic angle between two rotations, accurate for tiny angles.
double rotation_angle_between(const Mat3& a, const Mat3& b);

/// Linear pixel index v * width + u.
using PixelIndex = std::size_t;

struct PointCloud {
  std::vector<Vec3> points;
  /// Either empty or one entry per point.
  std::vector<PixelIndex> source_pixels;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_source_pixels() const { return !source_pixels.empty(); }

  bool operator==(const PointCloud&) const = default;
};

/// One point per valid (depth > 0) pixel inside `mask`.
PointCloud lift_depth(const DepthImage& depth, const CameraIntrinsics& k,
                      const BinaryMask* mask = nullptr);
/// Number of pixels inside `mask` skipped by lift_depth for invalid depth.
std::size_t count_invalid_depth(const DepthImage& depth, const BinaryMask* mask = nullptr);

/// Back-projects a sub-pixel location at the given depth.
Vec3 unproject(const Vec2& pixel, double depth, const CameraIntrinsics& k);

struct Projection {
  std::vector<Vec2> pixels;
  /// Points with z <= 0 that were dropped.
  std::size_t dropped = 0;
};

Projection project_points(const PointCloud& cloud, const CameraIntrinsics& k);
std::optional<Vec2> project_point(const Vec3& p, const CameraIntrinsics& k);

PointCloud apply(const RigidTransform& t, const PointCloud& cloud);

}  // namespace slotkit
