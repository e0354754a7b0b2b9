#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>

#include "slotkit/metrics.hpp"
#include "slotkit/placement.hpp"
#include "slotkit/registration.hpp"

namespace slotkit {

/// Environment variable naming the default config file.
inline constexpr const char* kConfigEnvVar = "SLOTKIT_CONFIG";

/// Every tunable of the pipeline, baseline and evaluator.
struct RunConfig {
  RansacParams ransac;
  int diff_threshold = 50;
  ScoringConfig scoring;
  int threads = 0;  // 0: OpenMP default

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& c);
/// Overlays the keys present in `j` onto `base`; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
/// Defaults overlaid with `path`, or with $SLOTKIT_CONFIG when `path` is empty.
RunConfig load_config(const std::optional<std::filesystem::path>& path);

inline constexpr int kReportVersion = 1;

nlohmann::json placement_report(const ScenePrediction& prediction, const std::string& scene,
                                const RunConfig& config);
/// Rebuilds the scoring-relevant part of a prediction. A null object mask
/// becomes an empty raster of the given size.
ScenePrediction prediction_from_report(const nlohmann::json& report, int width, int height);

nlohmann::json evaluation_report_json(const EvaluationReport& report, const RunConfig& config);
/// Columns scene,Obj,Slot,Prec.,CD,EMD with a trailing mean row.
std::string evaluation_csv(const EvaluationReport& report);

}  // namespace slotkit
