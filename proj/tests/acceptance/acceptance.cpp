// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "slotkit/fixtures.hpp"
#include "slotkit/masks.hpp"
#include "slotkit/metrics.hpp"
#include "slotkit/placement.hpp"
#include "slotkit/registration.hpp"
#include "slotkit/report.hpp"

using namespace slotkit;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

Vec3 random_point(std::mt19937_64& rng, double spread) {
  std::uniform_real_distribution<double> u(-spread, spread);
  return {u(rng), u(rng), u(rng)};
}

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome procrustes_exactness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  double worst_r = 0.0, worst_t = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const RigidTransform truth(random_rotation(rng), random_point(rng, 5.0));
    std::vector<Vec3> src, dst;
    for (int i = 0; i < 50; ++i) {
      src.push_back(random_point(rng, 1.0));
      dst.push_back(truth(src.back()));
    }
    const RigidTransform est = procrustes_rigid(src, dst);
    worst_r = std::max(worst_r, rotation_angle_between(est.rotation(), truth.rotation()));
    worst_t = std::max(worst_t, (est.translation() - truth.translation()).norm());
  }
  const double dt = seconds_since(t0);
  std::ostringstream s;
  s << "1000 draws, max rotation err " << worst_r << " rad, max translation err " << worst_t << " m, " << dt
    << " s";
  return {worst_r < 1e-9 && worst_t < 1e-9 && dt < 5.0, s.str()};
}

std::vector<PointPair> contaminated(std::uint64_t seed, const RigidTransform& truth) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.001);
  std::vector<PointPair> out;
  for (int i = 0; i < 70; ++i) {
    const Vec3 p = random_point(rng, 0.25);
    out.push_back({p, truth(p) + Vec3(noise(rng), noise(rng), noise(rng))});
  }
  for (int i = 0; i < 30; ++i) out.push_back({random_point(rng, 0.25), truth(random_point(rng, 0.25))});
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

Outcome ransac_robustness() {
  int ok = 0;
  bool deterministic = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed + 5000);
    const RigidTransform truth(random_rotation(rng), random_point(rng, 0.5));
    const auto pairs = contaminated(seed, truth);
    RansacParams params;
    params.seed = seed;
    params.inlier_threshold = 0.01;
    const RegistrationResult r = ransac_register(pairs, params);
    deterministic = deterministic && r == ransac_register(pairs, params) &&
                    r == reference::ransac_register(pairs, params);
    if (rotation_angle_between(r.transform.rotation(), truth.rotation()) < 0.5 * std::numbers::pi / 180.0 &&
        (r.transform.translation() - truth.translation()).norm() < 0.005) {
      ++ok;
    }
  }
  std::ostringstream s;
  s << ok << "/100 trials within 0.5 deg / 5 mm, reruns " << (deterministic ? "bit-identical" : "DIFFER");
  return {ok >= 99 && deterministic, s.str()};
}

Outcome end_to_end() {
  double worst_r = 0.0, worst_t = 0.0, worst_prec = 1.0;
  std::size_t transforms = 0;
  int noisy_ok = 0;
  for (int i = 0; i < 20; ++i) {
    SynthParams p;
    p.seed = 1000 + static_cast<std::uint64_t>(i);
    p.n_slots = 1 + static_cast<std::size_t>(i % 3);
    const ScenePair s = generate_scene(p);
    const ScenePrediction pred = predict_scene(s, {});
    for (std::size_t k = 0; k < pred.placements.size(); ++k) {
      const auto& t = pred.placements[k].transform;
      const auto& g = s.ground_truth->placements[k];
      const double r_err = pred.placements[k].fallback ? INFINITY : rotation_angle_between(t.rotation(), g.rotation());
      worst_r = std::max(worst_r, r_err);
      worst_t = std::max(worst_t, (t.translation() - g.translation()).norm());
      ++transforms;
    }
    worst_prec = std::min(worst_prec, score_scene(pred, s, {}).transform_precision);

    p.noise_sigma = 0.002;
    p.outlier_fraction = 0.1;
    const ScenePair noisy = generate_scene(p);
    const SceneScore ns = score_scene(predict_scene(noisy, {}), noisy, {});
    if (ns.transform_precision >= 0.9 && ns.chamfer <= 1e-4) ++noisy_ok;
  }
  std::ostringstream s;
  s << "noise-free: " << transforms << " transforms, max err " << worst_r << " rad / " << worst_t
    << " m, min precision " << worst_prec << "; noisy: " << noisy_ok << "/20 scenes with precision >= 0.9 and CD <= 1e-4";
  return {worst_r < 1e-6 && worst_t < 1e-6 && worst_prec == 1.0 && noisy_ok >= 18, s.str()};
}

PointCloud random_cloud(std::mt19937_64& rng, std::size_t n) {
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) c.points.push_back(random_point(rng, 1.0));
  return c;
}

double brute_force_emd(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  const std::size_t n = a.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += (a[i] - b[perm[i]]).norm();
    best = std::min(best, sum);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(n);
}

double all_pairs_chamfer(const PointCloud& p, const PointCloud& q) {
  auto directed = [](const PointCloud& a, const PointCloud& b) {
    long double sum = 0.0L;
    for (const auto& x : a.points) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : b.points) best = std::min(best, (x - y).squaredNorm());
      sum += best;
    }
    return static_cast<double>(sum / a.size());
  };
  return 0.5 * (directed(p, q) + directed(q, p));
}

Outcome metric_oracles() {
  std::mt19937_64 rng(4);
  bool emd_exact = true;
  for (std::size_t n = 1; n <= 7; ++n) {
    for (int trial = 0; trial < 25; ++trial) {
      const PointCloud p = random_cloud(rng, n), q = random_cloud(rng, n);
      emd_exact = emd_exact && emd(p, q, n, 0) == brute_force_emd(p.points, q.points);
    }
  }
  double chamfer_gap = 0.0;
  for (std::size_t n : {1u, 10u, 100u, 300u, 500u}) {
    const PointCloud p = random_cloud(rng, n), q = random_cloud(rng, n);
    chamfer_gap = std::max(chamfer_gap, std::abs(chamfer(p, q) - all_pairs_chamfer(p, q)));
  }
  bool zeros = true;
  double invariance_gap = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const PointCloud p = random_cloud(rng, 64);
    PointCloud shuffled = p;
    std::shuffle(shuffled.points.begin(), shuffled.points.end(), rng);
    zeros = zeros && chamfer(p, p) == 0.0 && emd(p, shuffled, 64, 1) == 0.0;
    const PointCloud q = random_cloud(rng, 50);
    const RigidTransform t(random_rotation(rng), random_point(rng, 3.0));
    invariance_gap = std::max(invariance_gap, std::abs(chamfer(apply(t, p), apply(t, q)) - chamfer(p, q)));
  }
  std::ostringstream s;
  s << "EMD vs permutations " << (emd_exact ? "exact" : "MISMATCH") << ", chamfer oracle gap " << chamfer_gap
    << ", self-distances " << (zeros ? "zero" : "NONZERO") << ", rigid invariance gap " << invariance_gap;
  return {emd_exact && chamfer_gap <= 1e-12 && zeros && invariance_gap <= 1e-9, s.str()};
}

Outcome lift_project_round_trip() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> depth(0.05, 20.0);
  std::bernoulli_distribution valid(0.7);
  double worst = 0.0;
  std::size_t checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    CameraIntrinsics k;
    k.width = 40 + trial;
    k.height = 30 + trial;
    std::uniform_real_distribution<double> f(50.0, 800.0);
    k.fx = f(rng);
    k.fy = f(rng);
    k.cx = std::uniform_real_distribution<double>(0.0, k.width - 1.0)(rng);
    k.cy = std::uniform_real_distribution<double>(0.0, k.height - 1.0)(rng);
    DepthImage d(k.width, k.height);
    for (int v = 0; v < k.height; ++v)
      for (int u = 0; u < k.width; ++u)
        if (valid(rng)) d.set(u, v, depth(rng));
    const PointCloud c = lift_depth(d, k);
    const Projection pr = project_points(c, k);
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double u = static_cast<double>(c.source_pixels[i] % static_cast<std::size_t>(k.width));
      const double v = static_cast<double>(c.source_pixels[i] / static_cast<std::size_t>(k.width));
      worst = std::max({worst, std::abs(pr.pixels[i].x() - u), std::abs(pr.pixels[i].y() - v)});
      ++checked;
    }
  }
  std::ostringstream s;
  s << checked << " valid pixels, max residual " << worst << " px";
  return {worst <= 0.5 && checked > 0, s.str()};
}

Outcome fallback_protocol() {
  RunConfig config;
  config.ransac.min_inliers = 10;  // above what random pairs reach by chance
  EvaluationReport report;
  bool identity = true;
  for (int i = 0; i < 5; ++i) {
    SynthParams p;
    p.seed = 2000 + static_cast<std::uint64_t>(i);
    p.n_slots = 1 + static_cast<std::size_t>(i % 3);
    p.all_outlier_slots = true;
    const ScenePair s = generate_scene(p);
    const nlohmann::json written = placement_report(predict_scene(s, config.ransac), "scene", config);
    const ScenePrediction pred =
        prediction_from_report(nlohmann::json::parse(written.dump()), s.robot.depth.width(), s.robot.depth.height());
    for (const auto& sp : pred.placements) {
      identity = identity && sp.fallback && sp.transform == RigidTransform::identity() && sp.slot_mask.area() == 0;
    }
    report.scenes.push_back(score_scene(pred, s, config.scoring, "fallback_" + std::to_string(i)));
  }
  report.aggregate = aggregate_scores(report.scenes);
  const nlohmann::json j = evaluation_report_json(report, config);
  const double obj = j.at("aggregate").at("obj_iou").get<double>();
  const double prec = j.at("aggregate").at("transform_precision").get<double>();
  std::ostringstream s;
  s << "5 forced no-consensus scenes: identity+empty " << (identity ? "yes" : "NO") << ", report Obj " << obj
    << ", Prec " << prec;
  return {identity && obj == 0.0 && prec == 0.0, s.str()};
}

Outcome baseline_sanity() {
  double worst_f1 = 1.0;
  std::size_t identical_area = 0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const ChangeComposite c = make_change_composite(160, 120, seed);
    worst_f1 = std::min(worst_f1, f1_score(diff_slot_mask(c.start, c.end, 50), c.changed));
    identical_area += diff_slot_mask(c.start, c.start, 50).area() + diff_slot_mask(c.end, c.end, 50).area();
  }
  std::ostringstream s;
  s << "25 composites, min F1 " << worst_f1 << ", identical-frame area " << identical_area;
  return {worst_f1 == 1.0 && identical_area == 0, s.str()};
}

// Runs every unit-test binary once and adds the time spent on criteria 1-7.
Outcome suite_runtime(double acceptance_seconds) {
  const auto t0 = Clock::now();
  bool all_ran = true;
  std::istringstream list(SLOTKIT_UNIT_TESTS);
  std::string path;
  int binaries = 0;
  while (std::getline(list, path, ';')) {
    if (path.empty()) continue;
    const std::string cmd = "'" + path + "' > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    all_ran = all_ran && WIFEXITED(status);
    ++binaries;
  }
  const double total = seconds_since(t0) + acceptance_seconds;
  std::ostringstream s;
  s << binaries << " unit binaries + acceptance: " << total << " s (budget 60 s)";
  return {all_ran && total < 60.0, s.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Procrustes exactness", procrustes_exactness},
      {"RANSAC robustness", ransac_robustness},
      {"End-to-end placement chain", end_to_end},
      {"Metric oracles", metric_oracles},
      {"Lift/project round trip", lift_project_round_trip},
      {"Fallback protocol", fallback_protocol},
      {"Baseline sanity", baseline_sanity},
  };
  int failures = 0;
  const auto t0 = Clock::now();
  int index = 1;
  auto report = [&](const std::string& name, const Outcome& o) {
    std::printf("criterion %d %-28s %s  %s\n", index++, name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  };
  for (const auto& [name, fn] : criteria) {
    try {
      report(name, fn());
    } catch (const std::exception& e) {
      report(name, {false, std::string("exception: ") + e.what()});
    }
  }
  report("Suite runtime", suite_runtime(seconds_since(t0)));
  return failures == 0 ? 0 : 1;
}
