#include "slotkit/masks.hpp"

#include <cmath>
#include <vector>

#include "slotkit/error.hpp"
#include "slotkit/kernels.hpp"

namespace slotkit {

namespace {

struct Counts {
  std::size_t inter = 0;
  std::size_t a = 0;
  std::size_t b = 0;
};

Counts count(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) {
    throw InputError("mask shapes differ: " + std::to_string(a.width()) + "x" +
                     std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                     std::to_string(b.height()));
  }
  Counts c;
  const auto abits = a.bits();
  const auto bbits = b.bits();
  for (std::size_t i = 0; i < abits.size(); ++i) {
    c.a += abits[i];
    c.b += bbits[i];
    c.inter += abits[i] & bbits[i];
  }
  return c;
}

}  // namespace

double iou(const BinaryMask& a, const BinaryMask& b) {
  const Counts c = count(a, b);
  const std::size_t uni = c.a + c.b - c.inter;
  if (uni == 0) return 1.0;
  return static_cast<double>(c.inter) / static_cast<double>(uni);
}

double precision(const BinaryMask& pred, const BinaryMask& gt) {
  const Counts c = count(pred, gt);
  if (c.a == 0) return 0.0;
  return static_cast<double>(c.inter) / static_cast<double>(c.a);
}

double recall(const BinaryMask& pred, const BinaryMask& gt) {
  const Counts c = count(pred, gt);
  if (c.b == 0) return 0.0;
  return static_cast<double>(c.inter) / static_cast<double>(c.b);
}

double f1_score(const BinaryMask& pred, const BinaryMask& gt) {
  const Counts c = count(pred, gt);
  if (c.a + c.b == 0) return 1.0;
  return 2.0 * static_cast<double>(c.inter) / static_cast<double>(c.a + c.b);
}

Rasterization rasterize_projection(std::span<const Vec2> pixels, int width, int height,
                                   int dilation_radius) {
  if (dilation_radius < 0) throw InputError("dilation radius must be >= 0");
  Rasterization out{BinaryMask(width, height), 0};
  std::vector<std::pair<int, int>> hits;
  for (const Vec2& p : pixels) {
    if (!p.allFinite()) {
      ++out.dropped;
      continue;
    }
    const double ru = std::round(p.x());
    const double rv = std::round(p.y());
    if (ru < 0.0 || rv < 0.0 || ru >= width || rv >= height) {
      ++out.dropped;
      continue;
    }
    const int u = static_cast<int>(ru);
    const int v = static_cast<int>(rv);
    out.mask.set(u, v);
    if (dilation_radius > 0) hits.emplace_back(u, v);
  }
  const int r = dilation_radius;
  for (const auto& [u, v] : hits) {
    for (int dv = -r; dv <= r; ++dv) {
      for (int du = -r; du <= r; ++du) {
        if (du * du + dv * dv > r * r) continue;
        const int x = u + du;
        const int y = v + dv;
        if (x >= 0 && y >= 0 && x < width && y < height) out.mask.set(x, y);
      }
    }
  }
  return out;
}

BinaryMask diff_slot_mask(const GrayImage& start, const GrayImage& end, int threshold) {
  if (!start.same_shape(end)) throw InputError("start and end images differ in size");
  if (threshold < 0 || threshold > 255) throw InputError("threshold must lie in [0, 255]");
  std::vector<std::uint8_t> bits(start.values().size());
  kernels::abs_diff_above(start.values(), end.values(), threshold, bits);
  return BinaryMask(start.width(), start.height(), std::move(bits));
}

}  // namespace slotkit
