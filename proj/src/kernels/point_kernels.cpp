#include <limits>

#include "slotkit/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace slotkit::kernels {

namespace {
// Below this many points the fork/join overhead dominates.
constexpr std::ptrdiff_t kParallelMin = 256;
}  // namespace

std::vector<double> nearest_sq_distances(std::span<const Vec3> from, std::span<const Vec3> to) {
  const auto n = static_cast<std::ptrdiff_t>(from.size());
  std::vector<double> out(from.size(), std::numeric_limits<double>::infinity());
  const Vec3* const targets = to.data();
  const std::size_t m = to.size();
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Vec3 p = from[static_cast<std::size_t>(i)];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      const double d = (p - targets[j]).squaredNorm();
      if (d < best) best = d;
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

std::vector<double> distance_matrix(std::span<const Vec3> rows, std::span<const Vec3> cols) {
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
  const std::size_t m = cols.size();
  std::vector<double> out(rows.size() * m);
#pragma omp parallel for schedule(static) if (n >= kParallelMin / 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Vec3 p = rows[static_cast<std::size_t>(i)];
    double* row = out.data() + static_cast<std::size_t>(i) * m;
    for (std::size_t j = 0; j < m; ++j) row[j] = (p - cols[j]).norm();
  }
  return out;
}

void abs_diff_above(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                    int threshold, std::span<std::uint8_t> out) {
  const auto n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for simd schedule(static) if (n >= 4096)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
    out[i] = (d > threshold || -d > threshold) ? 1 : 0;
  }
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

bool parallel_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

}  // namespace slotkit::kernels
