#pragma once

// Pieces shared by the batched and the serial RANSAC drivers.

#include <cstddef>
#include <span>

#include "slotkit/registration.hpp"

namespace slotkit::detail {

struct Hypothesis {
  bool valid = false;
  RigidTransform transform;
  std::size_t inliers = 0;
  double residual_sq_sum = 0.0;
};

/// Draws the minimal sample for `iteration`, fits it and scores it against
/// all pairs. Pure function of its arguments.
Hypothesis make_hypothesis(std::span<const PointPair> pairs, const RansacParams& params,
                           std::size_t iteration);

/// Consumes hypotheses in iteration order and decides when to stop.
class ConsensusTracker {
 public:
  ConsensusTracker(std::size_t pair_count, const RansacParams& params);

  /// False once iteration `iteration` lies beyond the adaptive bound.
  bool wants(std::size_t iteration) const;
  void consider(std::size_t iteration, const Hypothesis& h);

  std::size_t iterations_used() const { return used_; }
  const Hypothesis& best() const { return best_; }

 private:
  std::size_t pair_count_;
  const RansacParams& params_;
  Hypothesis best_;
  std::size_t required_;
  std::size_t used_ = 0;
};

void check_ransac_input(std::span<const PointPair> pairs, const RansacParams& params);

/// Refits on the best consensus set; throws NoConsensusError if too small.
RegistrationResult finalize(std::span<const PointPair> pairs, const RansacParams& params,
                            const ConsensusTracker& tracker);

}  // namespace slotkit::detail
