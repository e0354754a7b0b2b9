#include <limits>

#include "slotkit/kernels.hpp"

namespace slotkit::reference {

std::vector<double> nearest_sq_distances(std::span<const Vec3> from, std::span<const Vec3> to) {
  std::vector<double> out;
  out.reserve(from.size());
  for (const Vec3& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& q : to) {
      const double d = (p - q).squaredNorm();
      if (d < best) best = d;
    }
    out.push_back(best);
  }
  return out;
}

std::vector<double> distance_matrix(std::span<const Vec3> rows, std::span<const Vec3> cols) {
  std::vector<double> out;
  out.reserve(rows.size() * cols.size());
  for (const Vec3& p : rows) {
    for (const Vec3& q : cols) out.push_back((p - q).norm());
  }
  return out;
}

void abs_diff_above(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                    int threshold, std::span<std::uint8_t> out) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
    out[i] = (d > threshold || -d > threshold) ? 1 : 0;
  }
}

}  // namespace slotkit::reference
