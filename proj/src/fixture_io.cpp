#include <string>
#include <string_view>

#include "slotkit/error.hpp"
#include "slotkit/fixtures.hpp"
#include "slotkit/io.hpp"

namespace slotkit {

namespace {

using io::json;
namespace fs = std::filesystem;

const char* const kViews[] = {"human_start", "human_end", "robot"};

// Runs `fn`, prefixing any failure with the manifest field it was loading.
template <class F>
auto field(const std::string& name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const LoadError& e) {
    if (std::string_view(e.what()).starts_with("manifest field")) throw;
    throw LoadError("manifest field '" + name + "': " + e.what());
  } catch (const Error& e) {
    throw LoadError("manifest field '" + name + "': " + e.what());
  } catch (const json::exception& e) {
    throw LoadError("manifest field '" + name + "': " + e.what());
  }
}

std::string entry(const json& j, const std::string& name) {
  if (!j.is_string()) throw LoadError("manifest field '" + name + "': expected a file name");
  return j.get<std::string>();
}

const json& member(const json& j, const char* key, const std::string& prefix) {
  const std::string name = prefix.empty() ? key : prefix + "." + key;
  if (!j.is_object() || !j.contains(key)) throw LoadError("manifest field '" + name + "' is missing");
  return j.at(key);
}

std::vector<std::size_t> index_list(const json& j) {
  return j.get<std::vector<std::size_t>>();
}

json write_ground_truth(const GroundTruth& gt, const fs::path& dir) {
  json placements = json::array();
  for (const auto& t : gt.placements) placements.push_back(io::to_json(t));
  json slots = json::array();
  for (const auto& t : gt.slot_human_to_robot) slots.push_back(io::to_json(t));
  io::write_ply(dir / "gt_post_placement_cloud.ply", gt.post_placement_cloud);
  io::write_mask_png(dir / "gt_post_placement_mask.png", gt.post_placement_mask);
  return {
      {"exact_slot_index", gt.exact_slot_index},
      {"placements", placements},
      {"stages",
       {{"object_robot_to_human", io::to_json(gt.object_robot_to_human)},
        {"object_human_motion", io::to_json(gt.object_human_motion)},
        {"slot_human_to_robot", slots}}},
      {"post_placement_cloud", "gt_post_placement_cloud.ply"},
      {"post_placement_mask", "gt_post_placement_mask.png"},
      {"outliers",
       {{"object_robot_to_human", gt.outliers.object_robot_to_human},
        {"object_human_motion", gt.outliers.object_human_motion},
        {"slot_human_to_robot", gt.outliers.slot_human_to_robot}}},
  };
}

GroundTruth read_ground_truth(const fs::path& file) {
  const fs::path dir = file.parent_path();
  const json j = io::read_json(file);
  GroundTruth gt;
  gt.exact_slot_index = field("ground_truth.exact_slot_index",
                              [&] { return member(j, "exact_slot_index", "ground_truth").get<std::size_t>(); });
  const json& placements = member(j, "placements", "ground_truth");
  for (std::size_t i = 0; i < placements.size(); ++i) {
    gt.placements.push_back(field("ground_truth.placements[" + std::to_string(i) + "]",
                                  [&] { return io::transform_from_json(placements.at(i)); }));
  }
  const json& stages = member(j, "stages", "ground_truth");
  gt.object_robot_to_human = field("ground_truth.stages.object_robot_to_human", [&] {
    return io::transform_from_json(member(stages, "object_robot_to_human", "ground_truth.stages"));
  });
  gt.object_human_motion = field("ground_truth.stages.object_human_motion", [&] {
    return io::transform_from_json(member(stages, "object_human_motion", "ground_truth.stages"));
  });
  const json& slots = member(stages, "slot_human_to_robot", "ground_truth.stages");
  for (std::size_t i = 0; i < slots.size(); ++i) {
    gt.slot_human_to_robot.push_back(field("ground_truth.stages.slot_human_to_robot[" + std::to_string(i) + "]",
                                           [&] { return io::transform_from_json(slots.at(i)); }));
  }
  gt.post_placement_cloud = field("ground_truth.post_placement_cloud", [&] {
    return io::read_ply(dir / entry(member(j, "post_placement_cloud", "ground_truth"),
                                    "ground_truth.post_placement_cloud"));
  });
  gt.post_placement_mask = field("ground_truth.post_placement_mask", [&] {
    return io::read_mask_png(dir / entry(member(j, "post_placement_mask", "ground_truth"),
                                         "ground_truth.post_placement_mask"));
  });
  if (j.contains("outliers")) {
    const json& o = j.at("outliers");
    field("ground_truth.outliers", [&] {
      gt.outliers.object_robot_to_human = index_list(o.at("object_robot_to_human"));
      gt.outliers.object_human_motion = index_list(o.at("object_human_motion"));
      gt.outliers.slot_human_to_robot = o.at("slot_human_to_robot").get<std::vector<std::vector<std::size_t>>>();
      return 0;
    });
  }
  return gt;
}

}  // namespace

void write_scene(const ScenePair& scene, const fs::path& dir) {
  scene.validate();
  fs::create_directories(dir);
  json views = json::object();
  for (const char* name : kViews) {
    const View& v = scene.view(name);
    const std::string stem = name;
    io::write_depth_png(dir / (stem + "_depth.png"), v.depth);
    io::write_gray_png(dir / (stem + "_gray.png"), v.gray);
    io::write_json(dir / (stem + "_intrinsics.json"), io::to_json(v.intrinsics));
    views[stem] = {{"depth", stem + "_depth.png"},
                   {"gray", stem + "_gray.png"},
                   {"intrinsics", stem + "_intrinsics.json"}};
  }

  io::write_mask_png(dir / "object_human_start.png", scene.object_mask_human_start);
  io::write_mask_png(dir / "object_human_end.png", scene.object_mask_human_end);
  io::write_mask_png(dir / "object_robot.png", scene.object_mask_robot);
  io::write_mask_png(dir / "slot_human_start.png", scene.slot_mask_human_start);
  json robot_slots = json::array();
  json slot_corr = json::array();
  for (std::size_t i = 0; i < scene.slot_count(); ++i) {
    const std::string m = "slot_robot_" + std::to_string(i) + ".png";
    io::write_mask_png(dir / m, scene.slot_masks_robot[i]);
    robot_slots.push_back(m);
    const std::string c = "corr_slot_" + std::to_string(i) + ".json";
    io::write_json(dir / c, io::to_json(scene.slot_human_to_robot[i]));
    slot_corr.push_back(c);
  }
  io::write_json(dir / "corr_object_robot_to_human.json", io::to_json(scene.object_robot_to_human));
  io::write_json(dir / "corr_object_human_motion.json", io::to_json(scene.object_human_motion));

  json manifest = {
      {"format", "slotkit-scene"},
      {"version", kManifestVersion},
      {"slot_count", scene.slot_count()},
      {"views", views},
      {"masks",
       {{"object",
         {{"human_start", "object_human_start.png"},
          {"human_end", "object_human_end.png"},
          {"robot", "object_robot.png"}}},
        {"slot", {{"human_start", "slot_human_start.png"}, {"robot", robot_slots}}}}},
      {"correspondences",
       {{"object_robot_to_human", "corr_object_robot_to_human.json"},
        {"object_human_motion", "corr_object_human_motion.json"},
        {"slot_human_to_robot", slot_corr}}},
  };
  if (scene.ground_truth) {
    io::write_json(dir / "ground_truth.json", write_ground_truth(*scene.ground_truth, dir));
    manifest["ground_truth"] = "ground_truth.json";
  }
  io::write_json(dir / "manifest.json", manifest);
}

ScenePair load_scene(const fs::path& path) {
  const fs::path file = fs::is_directory(path) ? path / "manifest.json" : path;
  const fs::path dir = file.parent_path();
  const json m = io::read_json(file);
  if (!m.is_object() || m.value("format", "") != "slotkit-scene") {
    throw LoadError("manifest field 'format': expected \"slotkit-scene\" in " + file.string());
  }
  const int version = field("version", [&] { return member(m, "version", "").get<int>(); });
  if (version != kManifestVersion) {
    throw LoadError("manifest field 'version': unsupported version " + std::to_string(version));
  }

  ScenePair s;
  const json& views = member(m, "views", "");
  for (const char* name : kViews) {
    const std::string prefix = std::string("views.") + name;
    const json& v = member(views, name, "views");
    View view;
    view.depth = field(prefix + ".depth",
                       [&] { return io::read_depth_png(dir / entry(member(v, "depth", prefix), prefix + ".depth")); });
    view.gray = field(prefix + ".gray",
                      [&] { return io::read_gray_png(dir / entry(member(v, "gray", prefix), prefix + ".gray")); });
    view.intrinsics = field(prefix + ".intrinsics", [&] {
      auto k = io::intrinsics_from_json(io::read_json(dir / entry(member(v, "intrinsics", prefix), prefix + ".intrinsics")));
      k.validate();
      return k;
    });
    if (view.depth.width() != view.gray.width() || view.depth.height() != view.gray.height() ||
        view.depth.width() != view.intrinsics.width || view.depth.height() != view.intrinsics.height) {
      throw LoadError("manifest field '" + prefix + "': depth, gray and intrinsics sizes disagree");
    }
    if (std::string(name) == "human_start") s.human_start = std::move(view);
    else if (std::string(name) == "human_end") s.human_end = std::move(view);
    else s.robot = std::move(view);
  }

  auto mask = [&](const json& parent, const char* key, const std::string& prefix) {
    const std::string name = prefix + "." + key;
    return field(name, [&] { return io::read_mask_png(dir / entry(member(parent, key, prefix), name)); });
  };
  const json& masks = member(m, "masks", "");
  const json& obj = member(masks, "object", "masks");
  s.object_mask_human_start = mask(obj, "human_start", "masks.object");
  s.object_mask_human_end = mask(obj, "human_end", "masks.object");
  s.object_mask_robot = mask(obj, "robot", "masks.object");
  const json& slot = member(masks, "slot", "masks");
  s.slot_mask_human_start = mask(slot, "human_start", "masks.slot");
  const json& robot_slots = member(slot, "robot", "masks.slot");
  if (!robot_slots.is_array() || robot_slots.empty()) {
    throw LoadError("manifest field 'masks.slot.robot': expected a non-empty list");
  }
  for (std::size_t i = 0; i < robot_slots.size(); ++i) {
    const std::string name = "masks.slot.robot[" + std::to_string(i) + "]";
    s.slot_masks_robot.push_back(
        field(name, [&] { return io::read_mask_png(dir / entry(robot_slots.at(i), name)); }));
  }
  if (m.contains("slot_count") && m.at("slot_count") != robot_slots.size()) {
    throw LoadError("manifest field 'slot_count' disagrees with masks.slot.robot");
  }

  const json& corr = member(m, "correspondences", "");
  auto load_corr = [&](const json& j, const std::string& name) {
    return field(name, [&] { return io::correspondences_from_json(io::read_json(dir / entry(j, name))); });
  };
  s.object_robot_to_human = load_corr(member(corr, "object_robot_to_human", "correspondences"),
                                      "correspondences.object_robot_to_human");
  s.object_human_motion = load_corr(member(corr, "object_human_motion", "correspondences"),
                                    "correspondences.object_human_motion");
  const json& sc = member(corr, "slot_human_to_robot", "correspondences");
  if (!sc.is_array()) throw LoadError("manifest field 'correspondences.slot_human_to_robot': expected a list");
  for (std::size_t i = 0; i < sc.size(); ++i) {
    s.slot_human_to_robot.push_back(
        load_corr(sc.at(i), "correspondences.slot_human_to_robot[" + std::to_string(i) + "]"));
  }

  if (m.contains("ground_truth") && !m.at("ground_truth").is_null()) {
    s.ground_truth = field("ground_truth", [&] {
      return read_ground_truth(dir / entry(m.at("ground_truth"), "ground_truth"));
    });
  }

  try {
    s.validate();
  } catch (const InputError& e) {
    throw LoadError(std::string("inconsistent fixture ") + dir.string() + ": " + e.what());
  }
  return s;
}

}  // namespace slotkit
