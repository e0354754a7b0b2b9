// Serial reference vs OpenMP kernels. Not part of ctest.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "slotkit/kernels.hpp"
#include "slotkit/registration.hpp"

namespace {

using slotkit::PointPair;
using slotkit::Vec3;

std::vector<Vec3> cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec3> out(n);
  for (auto& p : out) p = Vec3(u(rng), u(rng), u(rng));
  return out;
}

std::vector<PointPair> pairs(std::size_t n) {
  const auto src = cloud(n, 1);
  const auto junk = cloud(n, 2);
  std::vector<PointPair> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({src[i], i % 2 == 0 ? src[i] : junk[i]});
  return out;
}

void BM_NearestSerial(benchmark::State& st) {
  const auto a = cloud(st.range(0), 1), b = cloud(st.range(0), 2);
  for (auto _ : st) benchmark::DoNotOptimize(slotkit::reference::nearest_sq_distances(a, b));
}
void BM_NearestParallel(benchmark::State& st) {
  const auto a = cloud(st.range(0), 1), b = cloud(st.range(0), 2);
  for (auto _ : st) benchmark::DoNotOptimize(slotkit::kernels::nearest_sq_distances(a, b));
}
void BM_DistanceMatrixSerial(benchmark::State& st) {
  const auto a = cloud(st.range(0), 1), b = cloud(st.range(0), 2);
  for (auto _ : st) benchmark::DoNotOptimize(slotkit::reference::distance_matrix(a, b));
}
void BM_DistanceMatrixParallel(benchmark::State& st) {
  const auto a = cloud(st.range(0), 1), b = cloud(st.range(0), 2);
  for (auto _ : st) benchmark::DoNotOptimize(slotkit::kernels::distance_matrix(a, b));
}
void BM_RansacSerial(benchmark::State& st) {
  const auto p = pairs(st.range(0));
  slotkit::RansacParams params;
  params.confidence = 0.999999;
  for (auto _ : st) benchmark::DoNotOptimize(slotkit::reference::ransac_register(p, params));
}
void BM_RansacParallel(benchmark::State& st) {
  const auto p = pairs(st.range(0));
  slotkit::RansacParams params;
  params.confidence = 0.999999;
  for (auto _ : st) benchmark::DoNotOptimize(slotkit::ransac_register(p, params));
}

BENCHMARK(BM_NearestSerial)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NearestParallel)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DistanceMatrixSerial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DistanceMatrixParallel)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RansacSerial)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RansacParallel)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
