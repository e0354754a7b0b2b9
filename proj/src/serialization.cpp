#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "slotkit/error.hpp"
#include "slotkit/io.hpp"

namespace slotkit::io {

namespace {

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw LoadError(std::string("missing or non-numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

Vec2 vec2(const json& j) {
  if (!j.is_array() || j.size() != 2) throw LoadError("expected [u, v]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw LoadError("expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

json read_json(const fs::path& path) {
  if (!fs::exists(path)) throw LoadError("file not found: " + path.string());
  std::ifstream in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw LoadError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json to_json(const CameraIntrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy},
          {"width", k.width}, {"height", k.height}};
}

CameraIntrinsics intrinsics_from_json(const json& j) {
  CameraIntrinsics k;
  k.fx = number(j, "fx");
  k.fy = number(j, "fy");
  k.cx = number(j, "cx");
  k.cy = number(j, "cy");
  k.width = static_cast<int>(number(j, "width"));
  k.height = static_cast<int>(number(j, "height"));
  k.validate();
  return k;
}

json to_json(const RigidTransform& t) {
  json rot = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rot.push_back(t.rotation()(r, c));
  }
  const Vec3& tr = t.translation();
  return {{"rotation", rot}, {"translation", {tr.x(), tr.y(), tr.z()}}};
}

RigidTransform transform_from_json(const json& j) {
  if (!j.contains("rotation") || !j.contains("translation")) {
    throw LoadError("transform needs 'rotation' and 'translation'");
  }
  const json& r = j.at("rotation");
  if (!r.is_array() || r.size() != 9) throw LoadError("rotation must hold 9 numbers");
  Mat3 m;
  for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = r[static_cast<std::size_t>(i)].get<double>();
  try {
    return RigidTransform(m, vec3(j.at("translation")));
  } catch (const InputError& e) {
    throw LoadError(std::string("invalid transform: ") + e.what());
  }
}

json to_json(const CorrespondenceSet& set) {
  json pairs = json::array();
  std::string form;
  if (set.is_pixel_form()) {
    form = "pixel";
    for (const auto& p : set.pixel_pairs()) {
      pairs.push_back({{"src", {p.src.x(), p.src.y()}}, {"dst", {p.dst.x(), p.dst.y()}}});
    }
  } else {
    form = "point";
    for (const auto& p : set.point_pairs()) {
      pairs.push_back({{"src", {p.src.x(), p.src.y(), p.src.z()}},
                       {"dst", {p.dst.x(), p.dst.y(), p.dst.z()}}});
    }
  }
  return {{"source_view", set.source_view},
          {"target_view", set.target_view},
          {"form", form},
          {"pairs", pairs}};
}

CorrespondenceSet correspondences_from_json(const json& j) {
  CorrespondenceSet set;
  if (!j.is_object()) throw LoadError("correspondence file must be a JSON object");
  for (const char* key : {"source_view", "target_view", "form", "pairs"}) {
    if (!j.contains(key)) throw LoadError(std::string("correspondence file lacks '") + key + "'");
  }
  set.source_view = j.at("source_view").get<std::string>();
  set.target_view = j.at("target_view").get<std::string>();
  const std::string form = j.at("form").get<std::string>();
  const json& pairs = j.at("pairs");
  if (!pairs.is_array()) throw LoadError("'pairs' must be an array");
  try {
    if (form == "pixel") {
      std::vector<PixelPair> v;
      v.reserve(pairs.size());
      for (const auto& p : pairs) v.push_back({vec2(p.at("src")), vec2(p.at("dst"))});
      set.pairs = std::move(v);
    } else if (form == "point") {
      std::vector<PointPair> v;
      v.reserve(pairs.size());
      for (const auto& p : pairs) v.push_back({vec3(p.at("src")), vec3(p.at("dst"))});
      set.pairs = std::move(v);
    } else {
      throw LoadError("unknown correspondence form '" + form + "'");
    }
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed correspondence pair: ") + e.what());
  }
  return set;
}

json to_json(const RansacParams& p) {
  return {{"inlier_threshold", p.inlier_threshold},
          {"max_iterations", p.max_iterations},
          {"min_inliers", p.min_inliers},
          {"confidence", p.confidence},
          {"seed", p.seed}};
}

RansacParams ransac_from_json(const json& j, RansacParams p) {
  if (j.contains("inlier_threshold")) p.inlier_threshold = j.at("inlier_threshold").get<double>();
  if (j.contains("max_iterations")) p.max_iterations = j.at("max_iterations").get<std::size_t>();
  if (j.contains("min_inliers")) p.min_inliers = j.at("min_inliers").get<std::size_t>();
  if (j.contains("confidence")) p.confidence = j.at("confidence").get<double>();
  if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
  p.validate();
  return p;
}

json to_json(const RegistrationResult& r) {
  return {{"transform", to_json(r.transform)},
          {"inlier_count", r.inlier_indices.size()},
          {"inlier_indices", r.inlier_indices},
          {"rms_inlier_error", r.rms_inlier_error},
          {"iterations_used", r.iterations_used}};
}

json mask_to_rle(const BinaryMask& mask) {
  json runs = json::array();
  const auto bits = mask.bits();
  std::uint8_t current = 0;
  std::size_t run = 0;
  for (std::uint8_t b : bits) {
    if (b != current) {
      runs.push_back(run);
      run = 0;
      current = b;
    }
    ++run;
  }
  runs.push_back(run);
  return {{"width", mask.width()}, {"height", mask.height()}, {"runs", runs}};
}

BinaryMask mask_from_rle(const json& j) {
  const int w = j.at("width").get<int>();
  const int h = j.at("height").get<int>();
  std::vector<std::uint8_t> bits;
  bits.reserve(static_cast<std::size_t>(w) * h);
  std::uint8_t value = 0;
  for (const auto& run : j.at("runs")) {
    bits.insert(bits.end(), run.get<std::size_t>(), value);
    value ^= 1;
  }
  if (bits.size() != static_cast<std::size_t>(w) * h) throw LoadError("mask RLE length mismatch");
  return BinaryMask(w, h, std::move(bits));
}

void write_ply(const fs::path& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  const bool px = cloud.has_source_pixels();
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size() << '\n'
      << "property double x\nproperty double y\nproperty double z\n";
  if (px) out << "property uint64 pixel\n";
  out << "end_header\n";
  char buf[128];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g", p.x(), p.y(), p.z());
    out << buf;
    if (px) out << ' ' << cloud.source_pixels[i];
    out << '\n';
  }
}

PointCloud read_ply(const fs::path& path) {
  if (!fs::exists(path)) throw LoadError("file not found: " + path.string());
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  if (line != "ply") throw LoadError("not a PLY file: " + path.string());
  std::size_t count = 0;
  int properties = 0;
  bool ascii = false;
  while (std::getline(in, line) && line != "end_header") {
    std::istringstream ss(line);
    std::string kw;
    ss >> kw;
    if (kw == "format") {
      std::string fmt;
      ss >> fmt;
      ascii = fmt == "ascii";
    } else if (kw == "element") {
      std::string name;
      ss >> name >> count;
    } else if (kw == "property") {
      ++properties;
    }
  }
  if (!ascii) throw LoadError("only ASCII PLY is supported: " + path.string());
  if (properties != 3 && properties != 4) throw LoadError("unexpected PLY vertex layout: " + path.string());
  PointCloud cloud;
  cloud.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw LoadError("truncated PLY: " + path.string());
    // strtod round-trips the 17-digit output exactly.
    const char* s = line.c_str();
    char* end = nullptr;
    Vec3 p;
    for (int c = 0; c < 3; ++c) {
      p[c] = std::strtod(s, &end);
      if (end == s) throw LoadError("malformed PLY vertex " + std::to_string(i));
      s = end;
    }
    cloud.points.push_back(p);
    if (properties == 4) cloud.source_pixels.push_back(std::strtoull(s, nullptr, 10));
  }
  return cloud;
}

}  // namespace slotkit::io
