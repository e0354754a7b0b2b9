#pragma once

#include <cstddef>
#include <span>

#include "slotkit/geometry.hpp"
#include "slotkit/image.hpp"

namespace slotkit {

/// Intersection over union; 1.0 when both masks are empty, 0.0 when exactly
/// one is. Throws InputError on a shape mismatch.
double iou(const BinaryMask& a, const BinaryMask& b);

/// |pred ∩ gt| / |pred|; 0.0 for an empty prediction.
double precision(const BinaryMask& pred, const BinaryMask& gt);

/// |pred ∩ gt| / |gt|; 0.0 for an empty ground truth.
double recall(const BinaryMask& pred, const BinaryMask& gt);

/// Harmonic mean of precision and recall, 2|p∩g| / (|p| + |g|). 1.0 when both
/// are empty.
double f1_score(const BinaryMask& pred, const BinaryMask& gt);

struct Rasterization {
  BinaryMask mask;
  std::size_t dropped = 0;  // coordinates outside the image after rounding
};

/// Marks the nearest pixel (round half away from zero) of every coordinate.
/// With dilation_radius > 0 every pixel within that Euclidean radius of an
/// occupied pixel is marked as well.
Rasterization rasterize_projection(std::span<const Vec2> pixels, int width, int height,
                                   int dilation_radius = 0);

/// Image-difference slot baseline: set where |start - end| > threshold.
BinaryMask diff_slot_mask(const GrayImage& start, const GrayImage& end, int threshold = 50);

inline constexpr int kDefaultDiffThreshold = 50;

}  // namespace slotkit
