#pragma once

// Data-parallel inner loops. Every kernel in `kernels` has a serial twin in
// `reference` with the same signature; the two must agree bit for bit.

#include <cstdint>
#include <span>
#include <vector>

#include "slotkit/geometry.hpp"

namespace slotkit {

namespace kernels {

/// For each point of `from`, squared distance to its nearest point in `to`.
std::vector<double> nearest_sq_distances(std::span<const Vec3> from, std::span<const Vec3> to);

/// Row-major |rows| x |cols| matrix of Euclidean distances.
std::vector<double> distance_matrix(std::span<const Vec3> rows, std::span<const Vec3> cols);

/// out[i] = |a[i] - b[i]| > threshold.
void abs_diff_above(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                    int threshold, std::span<std::uint8_t> out);

/// Number of OpenMP threads kernels will use (1 without OpenMP).
int max_threads();
/// Whether the library was built with OpenMP.
bool parallel_enabled();

}  // namespace kernels

namespace reference {

std::vector<double> nearest_sq_distances(std::span<const Vec3> from, std::span<const Vec3> to);
std::vector<double> distance_matrix(std::span<const Vec3> rows, std::span<const Vec3> cols);
void abs_diff_above(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                    int threshold, std::span<std::uint8_t> out);

}  // namespace reference

}  // namespace slotkit
