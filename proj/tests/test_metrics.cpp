#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "slotkit/error.hpp"
#include "slotkit/fixtures.hpp"
#include "slotkit/metrics.hpp"
#include "test_support.hpp"

namespace slotkit {
namespace {

using test::random_point;
using test::random_transform;

PointCloud make_cloud(std::vector<Vec3> pts) {
  PointCloud c;
  c.points = std::move(pts);
  return c;
}

PointCloud random_cloud(std::mt19937_64& rng, std::size_t n) {
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(random_point(rng));
  return make_cloud(std::move(pts));
}

// All-pairs Chamfer written independently of the library kernels.
double chamfer_oracle(const PointCloud& p, const PointCloud& q) {
  auto directed = [](const PointCloud& a, const PointCloud& b) {
    long double sum = 0.0L;
    for (const auto& x : a.points) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : b.points) {
        const double dx = x.x() - y.x(), dy = x.y() - y.y(), dz = x.z() - y.z();
        best = std::min(best, dx * dx + dy * dy + dz * dz);
      }
      sum += best;
    }
    return static_cast<double>(sum / static_cast<long double>(a.size()));
  };
  return 0.5 * (directed(p, q) + directed(q, p));
}

// Minimum over all permutations, summed in row order like the solver.
double brute_force_assignment(const std::vector<double>& cost, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += cost[i * n + perm[i]];
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double emd_oracle(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  const std::size_t n = a.size();
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = (a[i] - b[j]).norm();
  return brute_force_assignment(cost, n) / static_cast<double>(n);
}

TEST(Chamfer, HandCases) {
  const PointCloud origin = make_cloud({{0, 0, 0}});
  EXPECT_EQ(chamfer(origin, make_cloud({{1, 0, 0}})), 1.0);
  EXPECT_EQ(chamfer(make_cloud({{0, 0, 0}, {2, 0, 0}}), make_cloud({{1, 0, 0}})), 1.0);
  EXPECT_THROW(chamfer(origin, PointCloud{}), InputError);
}

TEST(Chamfer, SelfIsZeroAndSymmetric) {
  std::mt19937_64 rng(1);
  for (int n = 0; n < 20; ++n) {
    const PointCloud p = random_cloud(rng, 50);
    const PointCloud q = random_cloud(rng, 37);
    EXPECT_EQ(chamfer(p, p), 0.0);
    EXPECT_EQ(chamfer(p, q), chamfer(q, p));
    EXPECT_GE(chamfer(p, q), 0.0);
  }
}

TEST(Chamfer, MatchesAllPairsOracle) {
  std::mt19937_64 rng(2);
  for (std::size_t n : {1u, 2u, 17u, 100u, 250u, 500u}) {
    const PointCloud p = random_cloud(rng, n);
    const PointCloud q = random_cloud(rng, n == 1 ? 3 : n - 1);
    EXPECT_NEAR(chamfer(p, q), chamfer_oracle(p, q), 1e-12);
  }
}

TEST(Chamfer, RigidMotionInvariance) {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 20; ++n) {
    const PointCloud p = random_cloud(rng, 80);
    const PointCloud q = random_cloud(rng, 60);
    const RigidTransform t = random_transform(rng);
    EXPECT_NEAR(chamfer(apply(t, p), apply(t, q)), chamfer(p, q), 1e-9);
  }
}

TEST(Assignment, MatchesBruteForce) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> c(0.0, 10.0);
  for (std::size_t n = 1; n <= 7; ++n) {
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<double> cost(n * n);
      for (auto& x : cost) x = c(rng);
      const Assignment a = solve_assignment(cost, n);
      EXPECT_EQ(a.total_cost, brute_force_assignment(cost, n));
      std::vector<std::size_t> cols = a.col_for_row;
      std::sort(cols.begin(), cols.end());
      for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(cols[i], i);
    }
  }
}

TEST(Resample, Rules) {
  std::mt19937_64 rng(5);
  const PointCloud c = random_cloud(rng, 10);
  EXPECT_EQ(resample(c, 10, 7), c.points);
  const auto fewer = resample(c, 4, 7);
  ASSERT_EQ(fewer.size(), 4u);
  for (std::size_t i = 0; i < fewer.size(); ++i)
    for (std::size_t j = i + 1; j < fewer.size(); ++j) EXPECT_NE(fewer[i], fewer[j]);
  const auto more = resample(c, 25, 7);
  ASSERT_EQ(more.size(), 25u);
  for (const auto& p : c.points) EXPECT_NE(std::find(more.begin(), more.end(), p), more.end());
  EXPECT_EQ(resample(c, 25, 7), more);
}

TEST(Emd, HandCases) {
  EXPECT_EQ(emd(make_cloud({{0, 0, 0}}), make_cloud({{1, 0, 0}}), 1, 0), 1.0);
  EXPECT_EQ(emd(make_cloud({{0, 0, 0}, {1, 0, 0}}), make_cloud({{1, 0, 0}, {0, 0, 0}}), 2, 0), 0.0);
  std::mt19937_64 rng(6);
  const PointCloud p = random_cloud(rng, 40);
  EXPECT_EQ(emd(p, p, 40, 0), 0.0);
  EXPECT_EQ(emd(p, p, 64, 3), 0.0);
  EXPECT_THROW(emd(p, PointCloud{}, 8, 0), InputError);
  EXPECT_THROW(emd(p, p, 0, 0), InputError);
}

TEST(Emd, EqualMultisetsInDifferentOrder) {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 10; ++n) {
    PointCloud p = random_cloud(rng, 30);
    PointCloud q = p;
    std::shuffle(q.points.begin(), q.points.end(), rng);
    EXPECT_EQ(emd(p, q, 30, 0), 0.0);
  }
}

TEST(Emd, MatchesPermutationEnumeration) {
  std::mt19937_64 rng(8);
  for (std::size_t n = 1; n <= 7; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      const PointCloud p = random_cloud(rng, n);
      const PointCloud q = random_cloud(rng, n);
      EXPECT_EQ(emd(p, q, n, 0), emd_oracle(p.points, q.points));
      // Resampled variant: oracle applied to the same resampled clouds.
      const std::size_t sub = std::max<std::size_t>(1, n - 1);
      EXPECT_EQ(emd(p, q, sub, 9), emd_oracle(resample(p, sub, 9), resample(q, sub, 9)));
    }
  }
}

TEST(Emd, SymmetricAndNonNegative) {
  std::mt19937_64 rng(9);
  for (int n = 0; n < 10; ++n) {
    const PointCloud p = random_cloud(rng, 50);
    const PointCloud q = random_cloud(rng, 70);
    const double a = emd(p, q, 32, 5);
    EXPECT_GE(a, 0.0);
    EXPECT_NEAR(a, emd(q, p, 32, 5), 1e-12);
  }
}

TEST(MultiSlot, Examples) {
  BinaryMask a(6, 6), b(6, 6);
  a.set(0, 0);
  a.set(1, 0);
  b.set(4, 4);
  const std::vector<BinaryMask> gt{a, b};
  const MultiSlotScore all = score_multislot(gt, gt);
  EXPECT_EQ(all.mean_iou, 1.0);
  EXPECT_EQ(all.average_precision, 1.0);
  const std::vector<BinaryMask> one{a};
  const MultiSlotScore half = score_multislot(one, gt);
  EXPECT_EQ(half.mean_iou, 0.5);
  EXPECT_EQ(half.matched, 1u);
  EXPECT_EQ(half.average_precision, 0.5);
  const MultiSlotScore none = score_multislot({}, gt);
  EXPECT_EQ(none.mean_iou, 0.0);
  EXPECT_EQ(none.average_precision, 0.0);
}

TEST(MultiSlot, GreedyPrefersHighestIou) {
  BinaryMask g(4, 1), p1(4, 1), p2(4, 1);
  g.set(0, 0);
  g.set(1, 0);
  p1.set(0, 0);  // IoU 0.5
  p2.set(0, 0);
  p2.set(1, 0);  // IoU 1
  const std::vector<BinaryMask> preds{p1, p2};
  const std::vector<BinaryMask> gts{g};
  const MultiSlotScore s = score_multislot(preds, gts);
  EXPECT_EQ(s.matched, 1u);
  // matched IoU 1 plus one unmatched prediction
  EXPECT_DOUBLE_EQ(s.mean_iou, 0.5);
  // ranking: p1 (false positive), p2 (true positive) -> precision 1/2 at recall 1
  EXPECT_DOUBLE_EQ(s.average_precision, 0.5);
}

TEST(Aggregate, MeansRecompute) {
  std::vector<SceneScore> s(3);
  s[0].obj_iou = 1.0;
  s[1].obj_iou = 0.5;
  s[2].obj_iou = 0.0;
  s[0].chamfer = 0.3;
  s[1].chamfer = 0.6;
  s[2].chamfer = 0.9;
  s[2].used_fallback = true;
  const AggregateScores a = aggregate_scores(s);
  EXPECT_EQ(a.obj_iou, (1.0 + 0.5 + 0.0) / 3.0);
  EXPECT_EQ(a.chamfer, (0.3 + 0.6 + 0.9) / 3.0);
  EXPECT_EQ(a.fallback_rate, 1.0 / 3.0);
}

class SceneScoring : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SynthParams p;
    p.seed = 4;
    p.n_slots = 2;
    scene_ = new ScenePair(generate_scene(p));
  }
  static void TearDownTestSuite() { delete scene_; }
  static ScenePair* scene_;
};
ScenePair* SceneScoring::scene_ = nullptr;

TEST_F(SceneScoring, PerfectPrediction) {
  const GroundTruth& gt = *scene_->ground_truth;
  ScenePrediction pred;
  pred.object_mask = scene_->object_mask_robot;
  for (std::size_t i = 0; i < scene_->slot_count(); ++i) {
    SlotPlacement sp;
    sp.slot_index = i;
    sp.slot_mask = scene_->slot_masks_robot[i];
    sp.transform = gt.placements[i];
    pred.placements.push_back(sp);
  }
  const SceneScore s = score_scene(pred, *scene_, {}, "perfect");
  EXPECT_EQ(s.obj_iou, 1.0);
  EXPECT_EQ(s.slot_iou, 1.0);
  EXPECT_EQ(s.transform_precision, 1.0);
  EXPECT_EQ(s.chamfer, 0.0);
  EXPECT_EQ(s.emd, 0.0);
  EXPECT_FALSE(s.used_fallback);
  ASSERT_TRUE(s.multislot);
  EXPECT_EQ(s.multislot->mean_iou, 1.0);
}

TEST_F(SceneScoring, AbsentPredictionScoresZero) {
  const SceneScore s = score_scene(ScenePrediction{}, *scene_, {}, "absent");
  EXPECT_EQ(s.obj_iou, 0.0);
  EXPECT_EQ(s.slot_iou, 0.0);
  EXPECT_EQ(s.transform_precision, 0.0);
  EXPECT_TRUE(s.used_fallback);
  EXPECT_GT(s.chamfer, 0.0);
}

TEST_F(SceneScoring, MissingGroundTruthThrows) {
  ScenePair bare = *scene_;
  bare.ground_truth.reset();
  EXPECT_THROW(score_scene(ScenePrediction{}, bare, {}), InputError);
}

}  // namespace
}  // namespace slotkit
