#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "slotkit/error.hpp"
#include "slotkit/fixtures.hpp"
#include "slotkit/masks.hpp"

namespace slotkit {

namespace {

// Scene dimensions in meters. Every horizontal surface sits at a whole
// millimeter so 16-bit millimeter depth stores it exactly.
constexpr double kCameraHeight = 0.600;
constexpr double kSlotFloor = 0.020;
constexpr double kBodyTop = 0.040;
constexpr double kRecessHalfX = 0.035;
constexpr double kRecessHalfY = 0.025;
constexpr double kBodyBorder = 0.015;
constexpr double kObjectHalfX = 0.025;
constexpr double kObjectHalfY = 0.015;
constexpr double kObjectLow = 0.030;
constexpr double kObjectHigh = 0.045;
constexpr double kSampleMargin = 0.003;
constexpr double kFocal = 420.0;
constexpr int kOutlierPad = 15;
constexpr std::size_t kMaxAttemptsPerPoint = 200;

enum class Solid : std::uint8_t { kNone, kTable, kBody, kObject };

struct Box {
  RigidTransform pose;  // box frame -> world
  Vec3 lo;
  Vec3 hi;
  Solid solid;
};

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  Solid solid = Solid::kNone;
  bool up = false;  // surface normal points to +z
  Vec3 point = Vec3::Zero();
};

RigidTransform planar(const PlanarPose& p, double z = 0.0) {
  return RigidTransform::from_axis_angle(Vec3::UnitZ(), p.yaw, Vec3(p.x, p.y, z));
}

// Camera looking straight down from `height`, heading `yaw`.
RigidTransform down_camera(double x, double y, double height, double yaw) {
  Mat3 flip = Mat3::Identity();
  flip(1, 1) = -1.0;
  flip(2, 2) = -1.0;
  const Mat3 rz = RigidTransform::from_axis_angle(Vec3::UnitZ(), yaw).rotation();
  return RigidTransform(rz * flip, Vec3(x, y, height));
}

bool intersect(const Box& box, const Vec3& o, const Vec3& d, Hit& best) {
  const Mat3& r = box.pose.rotation();
  const Vec3 ol = r.transpose() * (o - box.pose.translation());
  const Vec3 dl = r.transpose() * d;
  double tmin = 0.0;
  double tmax = std::numeric_limits<double>::infinity();
  int axis = -1;
  for (int a = 0; a < 3; ++a) {
    if (std::abs(dl[a]) < 1e-15) {
      if (ol[a] < box.lo[a] || ol[a] > box.hi[a]) return false;
      continue;
    }
    double t1 = (box.lo[a] - ol[a]) / dl[a];
    double t2 = (box.hi[a] - ol[a]) / dl[a];
    if (t1 > t2) std::swap(t1, t2);
    if (t1 > tmin) {
      tmin = t1;
      axis = a;
    }
    tmax = std::min(tmax, t2);
    if (tmax < tmin) return false;
  }
  if (axis < 0 || !(tmin < best.t)) return false;
  best.t = tmin;
  best.solid = box.solid;
  best.up = axis == 2 && dl[2] < 0.0;
  best.point = o + tmin * d;
  return true;
}

struct Lattice {
  std::size_t n = 1;
  std::size_t cols = 1;
  std::size_t rows = 1;
  double spacing = 0.09;

  Vec3 slot_center(std::size_t j) const {
    const double c = static_cast<double>(j % cols) - (static_cast<double>(cols) - 1.0) / 2.0;
    const double r = static_cast<double>(j / cols) - (static_cast<double>(rows) - 1.0) / 2.0;
    return {c * spacing, r * spacing, 0.0};
  }
  double half_x() const { return (static_cast<double>(cols) - 1.0) / 2.0 * spacing + kRecessHalfX + kBodyBorder; }
  double half_y() const { return (static_cast<double>(rows) - 1.0) / 2.0 * spacing + kRecessHalfY + kBodyBorder; }
  RigidTransform slot_pose(std::size_t j) const {
    return RigidTransform::translation_only(slot_center(j));
  }
};

// Tray: a base slab up to the slot floor plus rim boxes around the recesses.
std::vector<Box> body_boxes(const Lattice& lat, const RigidTransform& pose) {
  std::vector<Box> boxes;
  const double bx = lat.half_x();
  const double by = lat.half_y();
  boxes.push_back({pose, Vec3(-bx, -by, 0.0), Vec3(bx, by, kSlotFloor), Solid::kBody});

  std::vector<double> xs{-bx};  // column recess edges
  for (std::size_t c = 0; c < lat.cols; ++c) {
    const double cx = lat.slot_center(c).x();
    xs.push_back(cx - kRecessHalfX);
    xs.push_back(cx + kRecessHalfX);
  }
  xs.push_back(bx);
  for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
    boxes.push_back({pose, Vec3(xs[k], -by, kSlotFloor), Vec3(xs[k + 1], by, kBodyTop), Solid::kBody});
  }
  for (std::size_t c = 0; c < lat.cols; ++c) {
    const double x0 = xs[2 * c + 1];
    const double x1 = xs[2 * c + 2];
    std::vector<double> ys{-by};
    for (std::size_t r = 0; r < lat.rows; ++r) {
      const double cy = lat.slot_center(r * lat.cols).y();
      ys.push_back(cy - kRecessHalfY);
      ys.push_back(cy + kRecessHalfY);
    }
    ys.push_back(by);
    for (std::size_t k = 0; k + 1 < ys.size(); k += 2) {
      boxes.push_back({pose, Vec3(x0, ys[k], kSlotFloor), Vec3(x1, ys[k + 1], kBodyTop), Solid::kBody});
    }
    // Lattice cells past the last slot are filled in.
    for (std::size_t r = 0; r < lat.rows; ++r) {
      if (r * lat.cols + c < lat.n) continue;
      boxes.push_back({pose, Vec3(x0, ys[2 * r + 1], kSlotFloor), Vec3(x1, ys[2 * r + 2], kBodyTop),
                       Solid::kBody});
    }
  }
  return boxes;
}

// Stepped block: a low half and a high half, origin at the bottom center.
std::vector<Box> object_boxes(const RigidTransform& pose) {
  return {
      {pose, Vec3(0.0, -kObjectHalfY, 0.0), Vec3(kObjectHalfX, kObjectHalfY, kObjectLow), Solid::kObject},
      {pose, Vec3(-kObjectHalfX, -kObjectHalfY, 0.0), Vec3(0.0, kObjectHalfY, kObjectHigh), Solid::kObject},
  };
}

struct WorldState {
  std::vector<Box> boxes;
  bool table = true;
  std::optional<RigidTransform> body;  // for slot labelling
};

struct Render {
  DepthImage depth;
  GrayImage gray;
  BinaryMask object;
  std::vector<BinaryMask> slots;
  std::vector<Solid> solids;
};

std::uint8_t shade(const Hit& h, int slot) {
  switch (h.solid) {
    case Solid::kTable: {
      const auto cx = static_cast<long>(std::floor(h.point.x() / 0.02));
      const auto cy = static_cast<long>(std::floor(h.point.y() / 0.02));
      return ((cx + cy) & 1) != 0 ? 108 : 84;
    }
    case Solid::kBody:
      if (slot >= 0) return 64;
      return h.up ? 176 : 144;
    case Solid::kObject:
      return h.up ? 232 : 200;
    case Solid::kNone:
      break;
  }
  return 0;
}

int slot_of(const Vec3& world, const WorldState& w, const Lattice& lat) {
  if (!w.body) return -1;
  const Vec3 p = inverse(*w.body)(world);
  if (p.z() > kBodyTop - 1e-9) return -1;
  for (std::size_t j = 0; j < lat.n; ++j) {
    const Vec3 c = lat.slot_center(j);
    if (std::abs(p.x() - c.x()) <= kRecessHalfX + 1e-9 && std::abs(p.y() - c.y()) <= kRecessHalfY + 1e-9) {
      return static_cast<int>(j);
    }
  }
  return -1;
}

Render render(const WorldState& w, const RigidTransform& camera, const CameraIntrinsics& k,
              const Lattice& lat) {
  Render out{DepthImage(k.width, k.height), GrayImage(k.width, k.height),
             BinaryMask(k.width, k.height), {}, {}};
  out.slots.assign(lat.n, BinaryMask(k.width, k.height));
  out.solids.assign(static_cast<std::size_t>(k.width) * k.height, Solid::kNone);
  const Vec3 origin = camera.translation();
  const Mat3& rc = camera.rotation();
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      // Camera-frame direction has unit z, so the ray parameter is depth.
      const Vec3 dir = rc * Vec3((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
      Hit hit;
      for (const Box& b : w.boxes) intersect(b, origin, dir, hit);
      if (w.table && dir.z() < 0.0) {
        const double t = -origin.z() / dir.z();
        if (t > 0.0 && t < hit.t) {
          hit.t = t;
          hit.solid = Solid::kTable;
          hit.up = true;
          hit.point = origin + t * dir;
        }
      }
      if (hit.solid == Solid::kNone) continue;
      const int slot = hit.solid == Solid::kBody ? slot_of(hit.point, w, lat) : -1;
      out.depth.set(u, v, std::round(hit.t * 1000.0) / 1000.0);
      out.gray.set(u, v, shade(hit, slot));
      out.solids[static_cast<std::size_t>(v) * k.width + u] = hit.solid;
      if (hit.solid == Solid::kObject) out.object.set(u, v);
      if (slot >= 0) out.slots[static_cast<std::size_t>(slot)].set(u, v);
    }
  }
  return out;
}

struct Frame {
  RigidTransform camera;  // camera -> world
  Render render;
  const CameraIntrinsics* k;
};

// A surface point is usable when the pixel nearest to its projection sees the
// same solid at the same (whole-millimeter) depth.
std::optional<Vec2> usable_projection(const Vec3& world, Solid solid, const Frame& f) {
  const Vec3 pc = inverse(f.camera)(world);
  const auto px = project_point(pc, *f.k);
  if (!px) return std::nullopt;
  const double u = std::round(px->x());
  const double v = std::round(px->y());
  if (u < 1 || v < 1 || u >= f.k->width - 1 || v >= f.k->height - 1) return std::nullopt;
  const int iu = static_cast<int>(u);
  const int iv = static_cast<int>(v);
  if (f.render.solids[static_cast<std::size_t>(iv) * f.k->width + iu] != solid) return std::nullopt;
  if (std::abs(f.render.depth.at(iu, iv) - pc.z()) > 1e-9) return std::nullopt;
  return px;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Point on a top face of the block, object frame.
Vec3 sample_object_point(std::mt19937_64& rng) {
  const double y = uniform(rng, -kObjectHalfY + kSampleMargin, kObjectHalfY - kSampleMargin);
  if (uniform(rng, 0.0, 1.0) < 0.5) {
    return {uniform(rng, kSampleMargin, kObjectHalfX - kSampleMargin), y, kObjectLow};
  }
  return {uniform(rng, -kObjectHalfX + kSampleMargin, -kSampleMargin), y, kObjectHigh};
}

// Point on the slot floor or the surrounding rim, slot frame.
Vec3 sample_slot_point(std::mt19937_64& rng, double spacing) {
  if (uniform(rng, 0.0, 1.0) < 0.5) {
    return {uniform(rng, -kRecessHalfX + kSampleMargin, kRecessHalfX - kSampleMargin),
            uniform(rng, -kRecessHalfY + kSampleMargin, kRecessHalfY - kSampleMargin), kSlotFloor};
  }
  const double rx = std::min(spacing / 2.0, kRecessHalfX + 0.01);
  const double ry = std::min(spacing / 2.0, kRecessHalfY + 0.01);
  for (;;) {
    const double x = uniform(rng, -rx, rx);
    const double y = uniform(rng, -ry, ry);
    if (std::abs(x) > kRecessHalfX + kSampleMargin || std::abs(y) > kRecessHalfY + kSampleMargin) {
      return {x, y, kBodyTop};
    }
  }
}

struct BBox {
  double u0, v0, u1, v1;
};

BBox padded_bbox(const BinaryMask& m, int pad) {
  int u0 = m.width(), v0 = m.height(), u1 = -1, v1 = -1;
  for (int v = 0; v < m.height(); ++v) {
    for (int u = 0; u < m.width(); ++u) {
      if (!m.at(u, v)) continue;
      u0 = std::min(u0, u);
      v0 = std::min(v0, v);
      u1 = std::max(u1, u);
      v1 = std::max(v1, v);
    }
  }
  if (u1 < 0) return {0.0, 0.0, m.width() - 1.0, m.height() - 1.0};
  return {static_cast<double>(std::max(0, u0 - pad)), static_cast<double>(std::max(0, v0 - pad)),
          static_cast<double>(std::min(m.width() - 1, u1 + pad)),
          static_cast<double>(std::min(m.height() - 1, v1 + pad))};
}

struct SetSpec {
  std::string source_view;
  std::string target_view;
  const Frame* src;
  const Frame* dst;
  RigidTransform src_pose;  // sample frame -> world, source scene
  RigidTransform dst_pose;  // sample frame -> world, target scene
  Solid solid;
  bool object_points;
  BBox outlier_box;
  bool all_outliers;
};

CorrespondenceSet make_set(const SetSpec& s, const SynthParams& p, std::mt19937_64& rng,
                           std::vector<std::size_t>& outliers) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<PixelPair> pairs;
  pairs.reserve(p.points_per_set);
  std::size_t attempts = 0;
  while (pairs.size() < p.points_per_set) {
    if (++attempts > kMaxAttemptsPerPoint * p.points_per_set) {
      throw InputError("generator: could not find enough mutually visible surface points for " +
                       s.source_view + " -> " + s.target_view);
    }
    const Vec3 local = s.object_points ? sample_object_point(rng) : sample_slot_point(rng, p.slot_spacing);
    const auto src_px = usable_projection(s.src_pose(local), s.solid, *s.src);
    const Vec3 dst_world = s.dst_pose(local);
    const auto dst_px = usable_projection(dst_world, s.solid, *s.dst);
    if (!src_px || !dst_px) continue;
    Vec3 dst_cam = inverse(s.dst->camera)(dst_world);
    const Vec3 jitter(noise(rng), noise(rng), noise(rng));
    dst_cam += p.noise_sigma * jitter;
    const auto noisy = project_point(dst_cam, *s.dst->k);
    pairs.push_back({*src_px, noisy ? *noisy : *dst_px});
  }

  const std::size_t n = pairs.size();
  const auto m = s.all_outliers ? n
                                : static_cast<std::size_t>(std::llround(p.outlier_fraction * static_cast<double>(n)));
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  outliers.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(outliers.begin(), outliers.end());
  const BBox box = s.all_outliers
                       ? BBox{0.0, 0.0, s.dst->k->width - 1.0, s.dst->k->height - 1.0}
                       : s.outlier_box;
  for (std::size_t i : outliers) {
    pairs[i].dst = Vec2(uniform(rng, box.u0, box.u1), uniform(rng, box.v0, box.v1));
  }
  return {s.source_view, s.target_view, std::move(pairs)};
}

void check_inside(const BinaryMask& m, const std::string& what) {
  for (int u = 0; u < m.width(); ++u) {
    if (m.at(u, 0) || m.at(u, m.height() - 1)) {
      throw InputError("generator: " + what + " touches the image border; reduce slots or camera offset");
    }
  }
  for (int v = 0; v < m.height(); ++v) {
    if (m.at(0, v) || m.at(m.width() - 1, v)) {
      throw InputError("generator: " + what + " touches the image border; reduce slots or camera offset");
    }
  }
  if (m.area() == 0) throw InputError("generator: " + what + " is not visible");
}

BinaryMask unite(const BinaryMask& a, const BinaryMask& b) {
  BinaryMask out = a;
  auto bits = out.mutable_bits();
  const auto other = b.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] |= other[i];
  return out;
}

}  // namespace

void SynthParams::validate() const {
  if (n_slots < 1) throw InputError("synth: n_slots must be >= 1");
  if (!(outlier_fraction >= 0.0 && outlier_fraction < 1.0)) {
    throw InputError("synth: outlier_fraction must lie in [0, 1)");
  }
  if (!(noise_sigma >= 0.0)) throw InputError("synth: noise_sigma must be >= 0");
  if (points_per_set < 3) throw InputError("synth: points_per_set must be >= 3");
  if (!(slot_spacing >= 2.0 * kRecessHalfX + 0.01)) {
    throw InputError("synth: slot_spacing must be at least 0.08 m");
  }
  if (image_width < 16 || image_height < 16) throw InputError("synth: image is too small");
  if (!robot_camera.shift.allFinite() || !std::isfinite(robot_camera.yaw)) {
    throw InputError("synth: camera offset must be finite");
  }
}

SceneLayout resolve_layout(const SynthParams& p) {
  if (p.layout) return *p.layout;
  std::mt19937_64 rng(p.seed);
  constexpr double pi = std::numbers::pi;
  SceneLayout l;
  l.body_human = {0.07 + uniform(rng, -0.01, 0.01), uniform(rng, -0.01, 0.01), uniform(rng, -0.1, 0.1)};
  l.body_robot = {0.07 + uniform(rng, -0.02, 0.02), uniform(rng, -0.02, 0.02), uniform(rng, -0.2, 0.2)};
  l.object_human_start = {-0.19 + uniform(rng, -0.02, 0.02), uniform(rng, -0.08, 0.08), uniform(rng, -pi, pi)};
  l.object_robot_start = {-0.19 + uniform(rng, -0.02, 0.02), uniform(rng, -0.08, 0.08), uniform(rng, -pi, pi)};
  l.object_in_slot = {uniform(rng, -0.003, 0.003), uniform(rng, -0.003, 0.003), uniform(rng, -0.15, 0.15)};
  return l;
}

ScenePair generate_scene(const SynthParams& p) {
  p.validate();
  const SceneLayout layout = resolve_layout(p);
  // Layout draws use their own stream so explicit layouts leave the rest unchanged.
  std::mt19937_64 rng(p.seed ^ 0x5eed5eed5eed5eedULL);

  Lattice lat;
  lat.n = p.n_slots;
  lat.cols = std::min<std::size_t>(p.n_slots, 3);
  lat.rows = (p.n_slots + lat.cols - 1) / lat.cols;
  lat.spacing = p.slot_spacing;

  CameraIntrinsics k;
  k.width = p.image_width;
  k.height = p.image_height;
  k.fx = k.fy = kFocal * p.image_width / 480.0;
  k.cx = p.image_width / 2.0;
  k.cy = p.image_height / 2.0;
  k.validate();

  const RigidTransform cam_h = down_camera(0.0, 0.0, kCameraHeight, 0.0);
  const double dz = std::round(p.robot_camera.shift.z() * 1000.0) / 1000.0;
  const RigidTransform cam_r = down_camera(p.robot_camera.shift.x(), p.robot_camera.shift.y(),
                                           kCameraHeight + dz, p.robot_camera.yaw);
  if (!(kCameraHeight + dz > kObjectHigh + kSlotFloor + 0.05)) {
    throw InputError("synth: robot camera is too low");
  }

  const RigidTransform body_h = planar(layout.body_human);
  const RigidTransform body_r = planar(layout.body_robot);
  const RigidTransform obj_h = planar(layout.object_human_start);
  const RigidTransform obj_r = planar(layout.object_robot_start);
  const RigidTransform in_slot = planar(layout.object_in_slot, kSlotFloor);
  const RigidTransform obj_h_end = body_h * lat.slot_pose(0) * in_slot;

  auto world = [&](const RigidTransform& body, const std::optional<RigidTransform>& object) {
    WorldState w;
    w.boxes = body_boxes(lat, body);
    if (object) {
      const auto ob = object_boxes(*object);
      w.boxes.insert(w.boxes.end(), ob.begin(), ob.end());
    }
    w.body = body;
    return w;
  };

  Frame h1{cam_h, render(world(body_h, obj_h), cam_h, k, lat), &k};
  Frame hn{cam_h, render(world(body_h, obj_h_end), cam_h, k, lat), &k};
  Frame rb{cam_r, render(world(body_r, obj_r), cam_r, k, lat), &k};

  check_inside(h1.render.object, "human-start object");
  check_inside(hn.render.object, "human-end object");
  check_inside(rb.render.object, "robot object");
  check_inside(h1.render.slots[0], "human-start slot");
  for (std::size_t i = 0; i < lat.n; ++i) check_inside(rb.render.slots[i], "robot slot " + std::to_string(i));

  ScenePair s;
  s.human_start = {h1.render.depth, h1.render.gray, k};
  s.human_end = {hn.render.depth, hn.render.gray, k};
  s.robot = {rb.render.depth, rb.render.gray, k};
  s.object_mask_human_start = h1.render.object;
  s.object_mask_human_end = hn.render.object;
  s.object_mask_robot = rb.render.object;
  s.slot_mask_human_start = h1.render.slots[0];
  s.slot_masks_robot = rb.render.slots;

  GroundTruth gt;
  const std::string hs(kHumanStartView), he(kHumanEndView), rv(kRobotView);
  s.object_robot_to_human =
      make_set({rv, hs, &rb, &h1, obj_r, obj_h, Solid::kObject, true,
                padded_bbox(h1.render.object, kOutlierPad), false},
               p, rng, gt.outliers.object_robot_to_human);
  s.object_human_motion =
      make_set({hs, he, &h1, &hn, obj_h, obj_h_end, Solid::kObject, true,
                padded_bbox(hn.render.object, kOutlierPad), false},
               p, rng, gt.outliers.object_human_motion);
  gt.outliers.slot_human_to_robot.resize(lat.n);
  for (std::size_t i = 0; i < lat.n; ++i) {
    s.slot_human_to_robot.push_back(
        make_set({hs, rv, &h1, &rb, body_h * lat.slot_pose(0), body_r * lat.slot_pose(i), Solid::kBody,
                  false, padded_bbox(rb.render.slots[i], kOutlierPad), p.all_outlier_slots},
                 p, rng, gt.outliers.slot_human_to_robot[i]));
  }

  // Stage transforms between camera frames.
  const RigidTransform obj_in_r = inverse(cam_r) * obj_r;
  const RigidTransform obj_in_h = inverse(cam_h) * obj_h;
  const RigidTransform obj_end_in_h = inverse(cam_h) * obj_h_end;
  const RigidTransform slot0_in_h = inverse(cam_h) * body_h * lat.slot_pose(0);
  gt.object_robot_to_human = obj_in_h * inverse(obj_in_r);
  gt.object_human_motion = obj_end_in_h * inverse(obj_in_h);
  for (std::size_t i = 0; i < lat.n; ++i) {
    const RigidTransform slot_in_r = inverse(cam_r) * body_r * lat.slot_pose(i);
    gt.slot_human_to_robot.push_back(slot_in_r * inverse(slot0_in_h));
    // Directly: the object moved into slot i of the robot scene.
    gt.placements.push_back(slot_in_r * in_slot * inverse(obj_in_r));
  }
  gt.exact_slot_index = 0;

  const PointCloud start = lift_depth(s.robot.depth, k, &s.object_mask_robot);
  gt.post_placement_cloud = apply(gt.placements[gt.exact_slot_index], start);
  WorldState alone;
  alone.table = false;
  alone.boxes = object_boxes(body_r * lat.slot_pose(gt.exact_slot_index) * in_slot);
  const Render silhouette = render(alone, cam_r, k, lat);
  const Projection proj = project_points(gt.post_placement_cloud, k);
  gt.post_placement_mask =
      unite(silhouette.object, rasterize_projection(proj.pixels, k.width, k.height).mask);
  s.ground_truth = std::move(gt);

  s.validate();
  return s;
}

ChangeComposite make_change_composite(int width, int height, std::uint64_t seed, int min_delta) {
  if (min_delta < 1 || min_delta > 127) throw InputError("composite: min_delta must lie in [1, 127]");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> level(0, 255);
  GrayImage start(width, height);
  for (auto& v : start.mutable_values()) v = static_cast<std::uint8_t>(level(rng));
  GrayImage end = start;

  const int pw = std::uniform_int_distribution<int>(std::max(1, width / 10), std::max(1, width / 3))(rng);
  const int ph = std::uniform_int_distribution<int>(std::max(1, height / 10), std::max(1, height / 3))(rng);
  const int u0 = std::uniform_int_distribution<int>(0, width - pw)(rng);
  const int v0 = std::uniform_int_distribution<int>(0, height - ph)(rng);
  std::uniform_int_distribution<int> delta(min_delta, 127);
  BinaryMask changed(width, height);
  for (int v = v0; v < v0 + ph; ++v) {
    for (int u = u0; u < u0 + pw; ++u) {
      const int s = start.at(u, v);
      const int d = delta(rng);
      end.set(u, v, static_cast<std::uint8_t>(s >= 128 ? s - d : s + d));
      changed.set(u, v);
    }
  }
  return {std::move(start), std::move(end), std::move(changed)};
}

}  // namespace slotkit
