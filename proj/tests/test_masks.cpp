#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "slotkit/error.hpp"
#include "slotkit/fixtures.hpp"
#include "slotkit/masks.hpp"

namespace slotkit {
namespace {

BinaryMask mask_of(int w, int h, std::initializer_list<std::pair<int, int>> px) {
  BinaryMask m(w, h);
  for (auto [u, v] : px) m.set(u, v);
  return m;
}

BinaryMask random_mask(std::mt19937_64& rng, int w, int h, double p) {
  std::bernoulli_distribution on(p);
  BinaryMask m(w, h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u)
      if (on(rng)) m.set(u, v);
  return m;
}

TEST(Iou, HandCases) {
  const BinaryMask a = mask_of(4, 4, {{0, 0}, {0, 1}});
  const BinaryMask b = mask_of(4, 4, {{0, 1}, {1, 1}});
  EXPECT_DOUBLE_EQ(iou(a, b), 1.0 / 3.0);
  EXPECT_EQ(iou(a, a), 1.0);
  EXPECT_EQ(iou(a, mask_of(4, 4, {{3, 3}})), 0.0);
  EXPECT_EQ(iou(BinaryMask(4, 4), BinaryMask(4, 4)), 1.0);
  EXPECT_EQ(iou(a, BinaryMask(4, 4)), 0.0);
  EXPECT_THROW(iou(a, BinaryMask(5, 4)), InputError);
}

TEST(Precision, HandCases) {
  const BinaryMask gt = mask_of(4, 4, {{0, 0}, {1, 0}, {2, 0}});
  EXPECT_EQ(precision(mask_of(4, 4, {{0, 0}, {1, 0}}), gt), 1.0);
  EXPECT_EQ(precision(mask_of(4, 4, {{3, 3}}), gt), 0.0);
  EXPECT_EQ(precision(mask_of(4, 4, {{0, 0}, {1, 0}, {3, 3}, {3, 2}}), gt), 0.5);
  EXPECT_EQ(precision(BinaryMask(4, 4), gt), 0.0);
  EXPECT_THROW(precision(gt, BinaryMask(4, 5)), InputError);
}

TEST(F1, BothEmptyIsPerfect) {
  EXPECT_EQ(f1_score(BinaryMask(3, 3), BinaryMask(3, 3)), 1.0);
  const BinaryMask a = mask_of(3, 3, {{0, 0}, {1, 1}});
  const BinaryMask b = mask_of(3, 3, {{1, 1}});
  EXPECT_DOUBLE_EQ(f1_score(a, b), 2.0 / 3.0);
}

TEST(Rasterize, RoundingAndDrops) {
  EXPECT_EQ(rasterize_projection({}, 8, 8).mask.area(), 0u);
  const std::vector<Vec2> one{{2.4, 3.6}};
  const Rasterization r = rasterize_projection(one, 8, 8);
  EXPECT_EQ(r.mask, mask_of(8, 8, {{2, 4}}));
  EXPECT_EQ(r.dropped, 0u);
  const std::vector<Vec2> outside{{-0.6, 1}, {8.5, 1}, {1, 7.5}, {1, -3}};
  const Rasterization o = rasterize_projection(outside, 8, 8);
  EXPECT_EQ(o.mask.area(), 0u);
  EXPECT_EQ(o.dropped, outside.size());
  const std::vector<Vec2> half{{2.5, 0.5}};
  EXPECT_TRUE(rasterize_projection(half, 8, 8).mask.at(3, 1));
}

TEST(Rasterize, Dilation) {
  const std::vector<Vec2> one{{4, 4}};
  const BinaryMask m = rasterize_projection(one, 9, 9, 1).mask;
  EXPECT_EQ(m.area(), 5u);  // disk of radius 1
  EXPECT_TRUE(m.at(4, 3) && m.at(3, 4) && m.at(5, 4) && m.at(4, 5));
  EXPECT_FALSE(m.at(3, 3));
}

TEST(DiffSlotMask, PatchChange) {
  GrayImage start(32, 24, 200);
  GrayImage end = start;
  BinaryMask expected(32, 24);
  for (int v = 5; v < 15; ++v)
    for (int u = 10; u < 20; ++u) {
      end.set(u, v, 80);
      expected.set(u, v);
    }
  EXPECT_EQ(diff_slot_mask(start, end, 50), expected);
  EXPECT_EQ(diff_slot_mask(start, start, 50).area(), 0u);
  EXPECT_THROW(diff_slot_mask(start, GrayImage(31, 24)), InputError);
}

TEST(DiffSlotMask, StrictThreshold) {
  GrayImage a(2, 1, 100);
  GrayImage b(2, 1, 100);
  b.set(0, 0, 150);  // difference exactly 50: not above
  b.set(1, 0, 151);
  const BinaryMask m = diff_slot_mask(a, b, 50);
  EXPECT_FALSE(m.at(0, 0));
  EXPECT_TRUE(m.at(1, 0));
}

TEST(DiffSlotMask, GeneratedComposite) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ChangeComposite c = make_change_composite(96, 64, seed);
    EXPECT_EQ(f1_score(diff_slot_mask(c.start, c.end, 50), c.changed), 1.0);
  }
}

TEST(Properties, MaskMetricInvariants) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> thr(0, 255);
  std::uniform_int_distribution<int> level(0, 255);
  for (int n = 0; n < 200; ++n) {
    const BinaryMask a = random_mask(rng, 12, 9, 0.3);
    const BinaryMask b = random_mask(rng, 12, 9, 0.3);
    const double ab = iou(a, b);
    EXPECT_EQ(ab, iou(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    if (a.area() > 0) {
      EXPECT_EQ(iou(a, a), 1.0);
      EXPECT_GE(precision(a, b), ab);
    }

    GrayImage x(12, 9), y(12, 9);
    for (int v = 0; v < 9; ++v)
      for (int u = 0; u < 12; ++u) {
        x.set(u, v, static_cast<std::uint8_t>(level(rng)));
        y.set(u, v, static_cast<std::uint8_t>(level(rng)));
      }
    const int t = thr(rng);
    EXPECT_EQ(diff_slot_mask(x, x, t).area(), 0u);
    EXPECT_EQ(diff_slot_mask(x, y, t), diff_slot_mask(y, x, t));

    std::vector<Vec2> px;
    std::uniform_real_distribution<double> coord(-3.0, 15.0);
    for (int i = 0; i < 30; ++i) px.emplace_back(coord(rng), coord(rng));
    EXPECT_LE(rasterize_projection(px, 12, 9).mask.area(), px.size());
  }
}

TEST(Gray, Bt601) {
  const std::vector<std::uint8_t> rgb{255, 0, 0, 0, 255, 0, 0, 0, 255, 10, 20, 30};
  const GrayImage g = rgb_to_gray(4, 1, rgb);
  EXPECT_EQ(g.at(0, 0), 76);   // 76.245
  EXPECT_EQ(g.at(1, 0), 150);  // 149.685
  EXPECT_EQ(g.at(2, 0), 29);   // 29.07
  EXPECT_EQ(g.at(3, 0), 18);   // 2.99 + 11.74 + 3.42 = 18.15
}

}  // namespace
}  // namespace slotkit
