#include "slotkit/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

#include "slotkit/error.hpp"
#include "slotkit/io.hpp"

namespace slotkit {

using nlohmann::json;

void RunConfig::validate() const {
  ransac.validate();
  if (diff_threshold < 0 || diff_threshold > 255) throw InputError("config: diff_threshold must lie in [0, 255]");
  if (scoring.emd_subsample < 1) throw InputError("config: emd.subsample must be >= 1");
  if (scoring.dilation_radius < 0) throw InputError("config: dilation_radius must be >= 0");
  if (!(scoring.ap_iou_threshold > 0.0 && scoring.ap_iou_threshold <= 1.0)) {
    throw InputError("config: ap_iou_threshold must lie in (0, 1]");
  }
  if (threads < 0) throw InputError("config: threads must be >= 0");
}

json to_json(const RunConfig& c) {
  return {
      {"ransac", io::to_json(c.ransac)},
      {"diff_threshold", c.diff_threshold},
      {"emd", {{"subsample", c.scoring.emd_subsample}, {"seed", c.scoring.emd_seed}}},
      {"dilation_radius", c.scoring.dilation_radius},
      {"ap_iou_threshold", c.scoring.ap_iou_threshold},
      {"threads", c.threads},
  };
}

RunConfig config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw InputError("config: expected a JSON object");
  static const std::set<std::string> known{"ransac", "diff_threshold", "emd", "dilation_radius",
                                           "ap_iou_threshold", "threads"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw InputError("config: unknown key '" + key + "'");
  }
  try {
    if (j.contains("ransac")) c.ransac = io::ransac_from_json(j.at("ransac"), c.ransac);
    if (j.contains("diff_threshold")) c.diff_threshold = j.at("diff_threshold").get<int>();
    if (j.contains("emd")) {
      const json& e = j.at("emd");
      if (e.contains("subsample")) c.scoring.emd_subsample = e.at("subsample").get<std::size_t>();
      if (e.contains("seed")) c.scoring.emd_seed = e.at("seed").get<std::uint64_t>();
    }
    if (j.contains("dilation_radius")) c.scoring.dilation_radius = j.at("dilation_radius").get<int>();
    if (j.contains("ap_iou_threshold")) c.scoring.ap_iou_threshold = j.at("ap_iou_threshold").get<double>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::optional<std::filesystem::path>& path) {
  std::optional<std::filesystem::path> file = path;
  if (!file) {
    if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') file = env;
  }
  if (!file) return {};
  try {
    return config_from_json(io::read_json(*file));
  } catch (const LoadError& e) {
    throw InputError(std::string("config: ") + e.what());
  }
}

namespace {

json stage_json(const StageDiagnostics& d) {
  json j = {{"status", std::string(to_string(d.status))},
            {"pairs", d.pairs_total},
            {"dropped_pairs", d.pairs_dropped},
            {"inliers", d.result ? json(d.result->inlier_indices.size()) : json(nullptr)}};
  if (d.result) {
    j["rms_inlier_error"] = d.result->rms_inlier_error;
    j["iterations"] = d.result->iterations_used;
  }
  if (!d.message.empty()) j["message"] = d.message;
  return j;
}

}  // namespace

json placement_report(const ScenePrediction& prediction, const std::string& scene, const RunConfig& config) {
  json placements = json::array();
  for (const auto& p : prediction.placements) {
    const auto count = [](const StageDiagnostics& d) {
      return d.result ? json(d.result->inlier_indices.size()) : json(nullptr);
    };
    placements.push_back({
        {"slot_index", p.slot_index},
        {"transform", io::to_json(p.transform)},
        {"fallback", p.fallback},
        {"failed_stage", p.failed_stage ? json(*p.failed_stage) : json(nullptr)},
        {"inlier_counts",
         {{std::string(kStageObjectRobotToHuman), count(p.object_robot_to_human)},
          {std::string(kStageObjectHumanMotion), count(p.object_human_motion)},
          {std::string(kStageSlotHumanToRobot), count(p.slot_human_to_robot)}}},
        {"stages",
         {{std::string(kStageObjectRobotToHuman), stage_json(p.object_robot_to_human)},
          {std::string(kStageObjectHumanMotion), stage_json(p.object_human_motion)},
          {std::string(kStageSlotHumanToRobot), stage_json(p.slot_human_to_robot)}}},
        {"slot_mask", io::mask_to_rle(p.slot_mask)},
    });
  }
  return {
      {"format", "slotkit-placements"},
      {"version", kReportVersion},
      {"scene", scene},
      {"config", to_json(config)},
      {"has_output", prediction.has_output()},
      {"object_mask", prediction.has_output() ? io::mask_to_rle(prediction.object_mask) : json(nullptr)},
      {"placements", placements},
  };
}

ScenePrediction prediction_from_report(const json& j, int width, int height) {
  if (!j.is_object() || j.value("format", "") != "slotkit-placements") {
    throw LoadError("placement report: expected format \"slotkit-placements\"");
  }
  if (j.value("version", 0) != kReportVersion) throw LoadError("placement report: unsupported version");
  ScenePrediction pred;
  try {
    const json& om = j.at("object_mask");
    pred.object_mask = om.is_null() ? BinaryMask(width, height) : io::mask_from_rle(om);
    for (const json& p : j.at("placements")) {
      SlotPlacement s;
      s.slot_index = p.at("slot_index").get<std::size_t>();
      s.transform = io::transform_from_json(p.at("transform"));
      s.fallback = p.at("fallback").get<bool>();
      if (p.contains("failed_stage") && !p.at("failed_stage").is_null()) {
        s.failed_stage = p.at("failed_stage").get<std::string>();
      }
      s.slot_mask = p.contains("slot_mask") && !p.at("slot_mask").is_null() ? io::mask_from_rle(p.at("slot_mask"))
                                                                            : BinaryMask(width, height);
      pred.placements.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw LoadError(std::string("placement report: ") + e.what());
  } catch (const InputError& e) {
    throw LoadError(std::string("placement report: ") + e.what());
  }
  return pred;
}

json evaluation_report_json(const EvaluationReport& r, const RunConfig& config) {
  json scenes = json::array();
  for (const auto& s : r.scenes) {
    json e = {{"scene", s.scene},
              {"obj_iou", s.obj_iou},
              {"slot_iou", s.slot_iou},
              {"transform_precision", s.transform_precision},
              {"chamfer", s.chamfer},
              {"emd", s.emd},
              {"used_fallback", s.used_fallback}};
    if (s.multislot) {
      e["multislot"] = {{"mean_iou", s.multislot->mean_iou},
                        {"average_precision", s.multislot->average_precision},
                        {"matched", s.multislot->matched},
                        {"predicted", s.multislot->predicted},
                        {"annotated", s.multislot->annotated}};
    }
    scenes.push_back(std::move(e));
  }
  const AggregateScores& a = r.aggregate;
  json aggregate = {{"scene_count", r.scenes.size()},
                    {"obj_iou", a.obj_iou},
                    {"slot_iou", a.slot_iou},
                    {"transform_precision", a.transform_precision},
                    {"chamfer", a.chamfer},
                    {"emd", a.emd},
                    {"fallback_rate", a.fallback_rate}};
  if (a.multislot_mean_iou) aggregate["multislot_mean_iou"] = *a.multislot_mean_iou;
  if (a.multislot_ap) aggregate["multislot_ap"] = *a.multislot_ap;
  json warnings = json::array();
  for (const auto& name : r.skipped) warnings.push_back("scene '" + name + "' has no ground truth; skipped");
  return {
      {"format", "slotkit-evaluation"},
      {"version", kReportVersion},
      {"config", to_json(config)},
      {"conventions",
       {{"chamfer", "0.5 * (mean_p min_q |p-q|^2 + mean_q min_p |p-q|^2), squared meters"},
        {"emd", "both clouds resampled to emd.subsample points with the same seed; exact assignment; "
                "mean Euclidean matching cost in meters"},
        {"fallback", "missing or fallback exact-slot placement scored with identity transform and empty masks"},
        {"rasterization", "nearest pixel, dilation_radius from config"},
        {"multislot", "greedy one-to-one matching by descending IoU; AP at ap_iou_threshold in prediction order"}}},
      {"scenes", scenes},
      {"aggregate", aggregate},
      {"skipped", r.skipped},
      {"skipped_count", r.skipped.size()},
      {"warnings", warnings},
  };
}

std::string evaluation_csv(const EvaluationReport& r) {
  std::ostringstream out;
  out << "scene,Obj,Slot,Prec.,CD,EMD\n";
  char buf[256];
  const auto row = [&](const std::string& name, double obj, double slot, double prec, double cd, double emd) {
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f,%.9g,%.9g\n", obj, slot, prec, cd, emd);
    out << name << buf;
  };
  for (const auto& s : r.scenes) row(s.scene, s.obj_iou, s.slot_iou, s.transform_precision, s.chamfer, s.emd);
  const auto& a = r.aggregate;
  row("mean", a.obj_iou, a.slot_iou, a.transform_precision, a.chamfer, a.emd);
  return out.str();
}

}  // namespace slotkit
