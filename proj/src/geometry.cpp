#include "slotkit/geometry.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <cmath>
#include <string>

#include "slotkit/error.hpp"

namespace slotkit {

namespace {

constexpr double kValidationTolerance = 1e-9;
constexpr double kDriftTolerance = 1e-12;

void check_rotation(const Mat3& r) {
  if (!r.allFinite()) throw InputError("rotation has non-finite entries");
  if (orthonormality_residual(r) > kValidationTolerance) {
    throw InputError("rotation is not orthonormal within 1e-9");
  }
  if (std::abs(r.determinant() - 1.0) > kValidationTolerance) {
    throw InputError("rotation determinant is not +1 within 1e-9");
  }
}

}  // namespace

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw InputError("intrinsics: focal lengths must be positive");
  if (width <= 0 || height <= 0) throw InputError("intrinsics: image size must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw InputError("intrinsics: principal point outside the image");
  }
}

DepthImage::DepthImage(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw InputError("depth dimensions must be positive");
  meters_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0);
}

DepthImage::DepthImage(int width, int height, std::vector<double> meters)
    : width_(width), height_(height), meters_(std::move(meters)) {
  if (width <= 0 || height <= 0) throw InputError("depth dimensions must be positive");
  if (meters_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InputError("depth value count does not match its dimensions");
  }
  for (double d : meters_) {
    if (!std::isfinite(d) || d < 0.0) throw InputError("depth values must be finite and >= 0");
  }
}

RigidTransform::RigidTransform()
    : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  check_rotation(rotation_);
  if (!translation_.allFinite()) throw InputError("translation has non-finite entries");
}

RigidTransform RigidTransform::from_matrix(const Mat4& m) {
  if (m.row(3).cwiseAbs().head<3>().maxCoeff() > kValidationTolerance ||
      std::abs(m(3, 3) - 1.0) > kValidationTolerance) {
    throw InputError("homogeneous matrix has an invalid last row");
  }
  return RigidTransform(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
}

RigidTransform RigidTransform::translation_only(const Vec3& t) {
  return RigidTransform(Mat3::Identity(), t);
}

RigidTransform RigidTransform::from_axis_angle(const Vec3& axis, double angle,
                                               const Vec3& translation) {
  if (axis.norm() == 0.0) throw InputError("rotation axis must be non-zero");
  const Mat3 r = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  return RigidTransform(nearest_rotation(r), translation);
}

Mat4 RigidTransform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

double orthonormality_residual(const Mat3& r) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

double rotation_angle_between(const Mat3& a, const Mat3& b) {
  // ||A - B||_F = 2 sqrt(2) sin(theta / 2); stable where acos of the trace is not.
  const double chord = (a - b).norm() / (2.0 * std::sqrt(2.0));
  return 2.0 * std::asin(std::min(1.0, chord));
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  Mat3 r = a.rotation_ * b.rotation_;
  if (orthonormality_residual(r) > kDriftTolerance) r = nearest_rotation(r);
  return RigidTransform(RigidTransform::Unchecked{}, r,
                        a.rotation_ * b.translation_ + a.translation_);
}

RigidTransform inverse(const RigidTransform& t) {
  const Mat3 rt = t.rotation_.transpose();
  return RigidTransform(RigidTransform::Unchecked{}, rt, -(rt * t.translation_));
}

Vec3 unproject(const Vec2& pixel, double depth, const CameraIntrinsics& k) {
  return {(pixel.x() - k.cx) * depth / k.fx, (pixel.y() - k.cy) * depth / k.fy, depth};
}

PointCloud lift_depth(const DepthImage& depth, const CameraIntrinsics& k, const BinaryMask* mask) {
  k.validate();
  if (depth.width() != k.width || depth.height() != k.height) {
    throw InputError("depth image dimensions do not match the intrinsics");
  }
  if (mask != nullptr && (mask->width() != depth.width() || mask->height() != depth.height())) {
    throw InputError("mask dimensions do not match the depth image");
  }
  PointCloud cloud;
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      if (mask != nullptr && !mask->at(u, v)) continue;
      const double z = depth.at(u, v);
      if (!(z > 0.0)) continue;
      cloud.points.push_back(unproject(Vec2(u, v), z, k));
      cloud.source_pixels.push_back(static_cast<PixelIndex>(v) *
                                        static_cast<PixelIndex>(depth.width()) +
                                    static_cast<PixelIndex>(u));
    }
  }
  return cloud;
}

std::size_t count_invalid_depth(const DepthImage& depth, const BinaryMask* mask) {
  if (mask != nullptr && (mask->width() != depth.width() || mask->height() != depth.height())) {
    throw InputError("mask dimensions do not match the depth image");
  }
  std::size_t n = 0;
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      if (mask != nullptr && !mask->at(u, v)) continue;
      if (!depth.valid(u, v)) ++n;
    }
  }
  return n;
}

std::optional<Vec2> project_point(const Vec3& p, const CameraIntrinsics& k) {
  if (!(p.z() > 0.0)) return std::nullopt;
  return Vec2(k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy);
}

Projection project_points(const PointCloud& cloud, const CameraIntrinsics& k) {
  Projection out;
  out.pixels.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    if (auto px = project_point(p, k)) {
      out.pixels.push_back(*px);
    } else {
      ++out.dropped;
    }
  }
  return out;
}

PointCloud apply(const RigidTransform& t, const PointCloud& cloud) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(t(p));
  out.source_pixels = cloud.source_pixels;
  return out;
}

}  // namespace slotkit
