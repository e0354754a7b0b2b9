#include "slotkit/registration.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

#include "ransac_detail.hpp"
#include "slotkit/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace slotkit {

namespace {

constexpr double kCollinearRatio = 1e-12;
constexpr int kSampleDraws = 8;
// Hypotheses scored per parallel batch. Results do not depend on it.
constexpr std::size_t kBatch = 32;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool nearly_collinear(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const double scale = ab.norm() * ac.norm();
  return scale == 0.0 || ab.cross(ac).norm() <= 1e-9 * scale;
}

bool better(const detail::Hypothesis& a, const detail::Hypothesis& b) {
  if (!a.valid) return false;
  if (!b.valid) return true;
  if (a.inliers != b.inliers) return a.inliers > b.inliers;
  return a.residual_sq_sum < b.residual_sq_sum;
}

}  // namespace

std::size_t CorrespondenceSet::size() const {
  return std::visit([](const auto& v) { return v.size(); }, pairs);
}

void RansacParams::validate() const {
  if (!(inlier_threshold > 0.0)) throw InputError("ransac: inlier_threshold must be > 0");
  if (max_iterations < 1) throw InputError("ransac: max_iterations must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw InputError("ransac: confidence must lie in (0, 1)");
  }
}

RigidTransform procrustes_rigid(std::span<const Vec3> src, std::span<const Vec3> dst) {
  if (src.size() != dst.size()) {
    throw InsufficientDataError("procrustes: source and target sizes differ");
  }
  if (src.size() < 3) {
    throw InsufficientDataError("procrustes: need at least 3 pairs, got " +
                                std::to_string(src.size()));
  }
  const double n = static_cast<double>(src.size());
  Vec3 cs = Vec3::Zero();
  Vec3 cd = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    cs += src[i];
    cd += dst[i];
  }
  cs /= n;
  cd /= n;
  if (!cs.allFinite() || !cd.allFinite()) throw InputError("procrustes: non-finite points");

  Mat3 scatter = Mat3::Zero();
  Mat3 cross = Mat3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Vec3 a = src[i] - cs;
    scatter.noalias() += a * a.transpose();
    cross.noalias() += a * (dst[i] - cd).transpose();
  }

  // Collinear sources leave the second principal direction empty. Coplanar
  // sources (one zero singular value) are well posed.
  const Vec3 spread = Eigen::JacobiSVD<Mat3>(scatter).singularValues();
  if (!(spread(0) > 0.0) || spread(1) < kCollinearRatio * spread(0)) {
    throw DegenerateConfigurationError("procrustes: source points are collinear");
  }

  Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  d(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Mat3 r = v * d * u.transpose();
  return RigidTransform(r, cd - r * cs);
}

RigidTransform procrustes_rigid(std::span<const PointPair> pairs) {
  std::vector<Vec3> src;
  std::vector<Vec3> dst;
  src.reserve(pairs.size());
  dst.reserve(pairs.size());
  for (const auto& p : pairs) {
    src.push_back(p.src);
    dst.push_back(p.dst);
  }
  return procrustes_rigid(src, dst);
}

std::size_t required_iterations(double inlier_ratio, double confidence,
                                std::size_t max_iterations) {
  const double p_good = inlier_ratio * inlier_ratio * inlier_ratio;
  if (p_good >= 1.0) return 1;
  if (p_good <= 0.0) return max_iterations;
  const double n = std::ceil(std::log(1.0 - confidence) / std::log1p(-p_good));
  if (!(n < static_cast<double>(max_iterations))) return max_iterations;
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

namespace detail {

Hypothesis make_hypothesis(std::span<const PointPair> pairs, const RansacParams& params,
                           std::size_t iteration) {
  Hypothesis h;
  std::mt19937_64 rng(splitmix64(params.seed ^ splitmix64(iteration)));
  std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);

  std::array<std::size_t, 3> idx{};
  bool found = false;
  for (int draw = 0; draw < kSampleDraws && !found; ++draw) {
    idx[0] = pick(rng);
    do idx[1] = pick(rng); while (idx[1] == idx[0]);
    do idx[2] = pick(rng); while (idx[2] == idx[0] || idx[2] == idx[1]);
    found = !nearly_collinear(pairs[idx[0]].src, pairs[idx[1]].src, pairs[idx[2]].src) &&
            !nearly_collinear(pairs[idx[0]].dst, pairs[idx[1]].dst, pairs[idx[2]].dst);
  }
  if (!found) return h;

  const std::array<Vec3, 3> src{pairs[idx[0]].src, pairs[idx[1]].src, pairs[idx[2]].src};
  const std::array<Vec3, 3> dst{pairs[idx[0]].dst, pairs[idx[1]].dst, pairs[idx[2]].dst};
  try {
    h.transform = procrustes_rigid(src, dst);
  } catch (const DegenerateConfigurationError&) {
    return h;
  }
  h.valid = true;
  const double thr = params.inlier_threshold;
  for (const auto& p : pairs) {
    const double r2 = (h.transform(p.src) - p.dst).squaredNorm();
    if (r2 < thr * thr) {
      ++h.inliers;
      h.residual_sq_sum += r2;
    }
  }
  return h;
}

ConsensusTracker::ConsensusTracker(std::size_t pair_count, const RansacParams& params)
    : pair_count_(pair_count), params_(params), required_(params.max_iterations) {}

bool ConsensusTracker::wants(std::size_t iteration) const {
  return iteration < required_ && iteration < params_.max_iterations;
}

void ConsensusTracker::consider(std::size_t iteration, const Hypothesis& h) {
  used_ = iteration + 1;
  if (!better(h, best_)) return;
  best_ = h;
  const double ratio = static_cast<double>(h.inliers) / static_cast<double>(pair_count_);
  required_ = required_iterations(ratio, params_.confidence, params_.max_iterations);
}

void check_ransac_input(std::span<const PointPair> pairs, const RansacParams& params) {
  params.validate();
  if (pairs.size() < 3) {
    throw InsufficientDataError("ransac: need at least 3 correspondences, got " +
                                std::to_string(pairs.size()));
  }
}

RegistrationResult finalize(std::span<const PointPair> pairs, const RansacParams& params,
                            const ConsensusTracker& tracker) {
  const Hypothesis& best = tracker.best();
  const std::size_t needed = std::max<std::size_t>(3, params.min_inliers);
  if (!best.valid || best.inliers < needed) {
    throw NoConsensusError("ransac: best consensus has " +
                               std::to_string(best.valid ? best.inliers : 0) +
                               " inliers, need " + std::to_string(needed),
                           best.valid ? best.inliers : 0);
  }

  const double thr2 = params.inlier_threshold * params.inlier_threshold;
  RegistrationResult result;
  std::vector<PointPair> consensus;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if ((best.transform(pairs[i].src) - pairs[i].dst).squaredNorm() < thr2) {
      result.inlier_indices.push_back(i);
      consensus.push_back(pairs[i]);
    }
  }
  try {
    result.transform = procrustes_rigid(consensus);
  } catch (const DegenerateConfigurationError&) {
    result.transform = best.transform;
  }
  double sum = 0.0;
  for (const auto& p : consensus) sum += (result.transform(p.src) - p.dst).squaredNorm();
  result.rms_inlier_error = std::sqrt(sum / static_cast<double>(consensus.size()));
  result.iterations_used = tracker.iterations_used();
  return result;
}

}  // namespace detail

RegistrationResult ransac_register(std::span<const PointPair> pairs, const RansacParams& params) {
  detail::check_ransac_input(pairs, params);
  detail::ConsensusTracker tracker(pairs.size(), params);
  std::vector<detail::Hypothesis> batch(kBatch);

  for (std::size_t start = 0; tracker.wants(start); start += kBatch) {
    const std::size_t count = std::min(kBatch, params.max_iterations - start);
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 1) if (pairs.size() >= 64)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      batch[static_cast<std::size_t>(j)] =
          detail::make_hypothesis(pairs, params, start + static_cast<std::size_t>(j));
    }
    for (std::size_t j = 0; j < count && tracker.wants(start + j); ++j) {
      tracker.consider(start + j, batch[j]);
    }
  }
  return detail::finalize(pairs, params, tracker);
}

namespace reference {

RegistrationResult ransac_register(std::span<const PointPair> pairs, const RansacParams& params) {
  detail::check_ransac_input(pairs, params);
  detail::ConsensusTracker tracker(pairs.size(), params);
  for (std::size_t it = 0; tracker.wants(it); ++it) {
    tracker.consider(it, detail::make_hypothesis(pairs, params, it));
  }
  return detail::finalize(pairs, params, tracker);
}

}  // namespace reference

}  // namespace slotkit
