#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "slotkit/io.hpp"
#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using slotkit::io::read_json;
using slotkit::io::write_json;

const std::string kCli = SLOTKIT_CLI_PATH;

int run(const std::string& args, const fs::path& stdout_file = "/dev/null") {
  const std::string cmd = "'" + kCli + "' " + args + " > '" + stdout_file.string() + "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = slotkit::test::scratch_dir(std::string("cli_") +
                                      ::testing::UnitTest::GetInstance()->current_test_info()->name());
  }
  std::string p(const std::string& name) const { return "'" + (dir_ / name).string() + "'"; }
  fs::path dir_;
};

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("gen --outliers 1.5 --out " + p("x")), 2);
  EXPECT_EQ(run("gen --slots 0 --out " + p("x")), 2);
  EXPECT_EQ(run("gen --seed 1"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
}

TEST_F(Cli, GenIsDeterministic) {
  ASSERT_EQ(run("gen --seed 7 --slots 3 --out " + p("a")), 0);
  ASSERT_EQ(run("gen --seed 7 --slots 3 --out " + p("b")), 0);
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "a")) {
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / "b" / e.path().filename())) << e.path();
    ++n;
  }
  EXPECT_GT(n, 20u);
  // Rerunning into an existing directory overwrites with identical bytes.
  ASSERT_EQ(run("gen --seed 7 --slots 3 --out " + p("a")), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "manifest.json"), slurp(dir_ / "b" / "manifest.json"));
}

TEST_F(Cli, PipelineNoiseFree) {
  ASSERT_EQ(run("gen --seed 4 --slots 3 --out " + p("s")), 0);
  ASSERT_EQ(run("pipeline --scene " + p("s") + " --out " + p("r.json")), 0);
  const json r = read_json(dir_ / "r.json");
  ASSERT_EQ(r.at("placements").size(), 3u);
  for (const auto& pl : r.at("placements")) EXPECT_FALSE(pl.at("fallback").get<bool>());
  EXPECT_EQ(r.at("config").at("ransac").at("inlier_threshold").get<double>(), 0.01);
  // Bit-identical rerun.
  ASSERT_EQ(run("pipeline --scene " + p("s") + " --out " + p("r2.json")), 0);
  EXPECT_EQ(slurp(dir_ / "r.json"), slurp(dir_ / "r2.json"));
}

TEST_F(Cli, PipelineAllOutlierSlotsFallBack) {
  ASSERT_EQ(run("gen --seed 4 --slots 2 --all-outlier-slots --out " + p("s")), 0);
  ASSERT_EQ(run("pipeline --min-inliers 10 --scene " + p("s") + " --out " + p("r.json")), 0);
  const json r = read_json(dir_ / "r.json");
  for (const auto& pl : r.at("placements")) {
    EXPECT_TRUE(pl.at("fallback").get<bool>());
    EXPECT_EQ(pl.at("transform").at("rotation"), json({1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0}));
    EXPECT_EQ(pl.at("transform").at("translation"), json({0.0, 0.0, 0.0}));
  }
  EXPECT_TRUE(r.at("object_mask").is_null());
}

TEST_F(Cli, PipelineMissingManifest) {
  EXPECT_EQ(run("pipeline --scene " + p("nowhere") + " --out " + p("r.json")), 1);
}

TEST_F(Cli, ConfigPrecedence) {
  ASSERT_EQ(run("gen --seed 4 --out " + p("s")), 0);
  write_json(dir_ / "cfg.json", json{{"ransac", {{"inlier_threshold", 0.02}, {"max_iterations", 50}}}});
  ASSERT_EQ(run("pipeline --config " + p("cfg.json") + " --max-iterations 70 --scene " + p("s") + " --out " +
                p("r.json")),
            0);
  const json c = read_json(dir_ / "r.json").at("config").at("ransac");
  EXPECT_EQ(c.at("inlier_threshold").get<double>(), 0.02);
  EXPECT_EQ(c.at("max_iterations").get<int>(), 70);
  EXPECT_EQ(c.at("confidence").get<double>(), 0.999);
  write_json(dir_ / "bad.json", json{{"nope", 1}});
  EXPECT_EQ(run("pipeline --config " + p("bad.json") + " --scene " + p("s") + " --out " + p("r.json")), 2);
}

TEST_F(Cli, EvaluatePerfectFallbackAndMixed) {
  std::string scenes, good, bad;
  ASSERT_EQ(run("gen --seed 50 --count 10 --slots 2 --out " + p("g")), 0);
  for (int i = 0; i < 10; ++i) {
    const std::string s = p("g/scene_" + std::to_string(i));
    ASSERT_EQ(run("pipeline --scene " + s + " --out " + p("good" + std::to_string(i) + ".json")), 0);
    ASSERT_EQ(run("gen --seed " + std::to_string(50 + i) +
                  " --slots 2 --all-outlier-slots --out " + p("f/scene_" + std::to_string(i))),
              0);
    ASSERT_EQ(run("pipeline --min-inliers 10 --scene " + p("f/scene_" + std::to_string(i)) + " --out " +
                  p("bad" + std::to_string(i) + ".json")),
              0);
    scenes += " " + s;
    good += " " + p("good" + std::to_string(i) + ".json");
    bad += " " + p("f/scene_" + std::to_string(i));
  }
  ASSERT_EQ(run("evaluate --scenes" + scenes + " --predictions" + good + " --out " + p("e.json") + " --csv " +
                p("e.csv")),
            0);
  const json e = read_json(dir_ / "e.json");
  const json& a = e.at("aggregate");
  EXPECT_EQ(a.at("obj_iou").get<double>(), 1.0);
  EXPECT_EQ(a.at("slot_iou").get<double>(), 1.0);
  EXPECT_EQ(a.at("transform_precision").get<double>(), 1.0);
  EXPECT_LT(a.at("chamfer").get<double>(), 1e-12);
  EXPECT_LT(a.at("emd").get<double>(), 1e-6);
  EXPECT_EQ(slurp(dir_ / "e.csv").substr(0, 28), "scene,Obj,Slot,Prec.,CD,EMD\n");

  std::string bad_preds;
  for (int i = 0; i < 10; ++i) bad_preds += " " + p("bad" + std::to_string(i) + ".json");
  ASSERT_EQ(run("evaluate --scenes" + bad + " --predictions" + bad_preds + " --out " + p("f.json")), 0);
  const json f = read_json(dir_ / "f.json").at("aggregate");
  EXPECT_EQ(f.at("obj_iou").get<double>(), 0.0);
  EXPECT_EQ(f.at("transform_precision").get<double>(), 0.0);
  EXPECT_EQ(f.at("fallback_rate").get<double>(), 1.0);

  // Mixed batch: five good, five fallback; recompute the means.
  std::string mixed_s, mixed_p;
  for (int i = 0; i < 10; ++i) {
    const bool use_good = i % 2 == 0;
    mixed_s += " " + (use_good ? p("g/scene_" + std::to_string(i)) : p("f/scene_" + std::to_string(i)));
    mixed_p += " " + p((use_good ? "good" : "bad") + std::to_string(i) + ".json");
  }
  ASSERT_EQ(run("evaluate --threads 3 --scenes" + mixed_s + " --predictions" + mixed_p + " --out " + p("m.json")), 0);
  const json m = read_json(dir_ / "m.json");
  for (const char* key : {"obj_iou", "slot_iou", "transform_precision", "chamfer", "emd"}) {
    double sum = 0.0;
    for (const auto& s : m.at("scenes")) sum += s.at(key).get<double>();
    EXPECT_EQ(m.at("aggregate").at(key).get<double>(), sum / 10.0) << key;
  }
  EXPECT_EQ(m.at("aggregate").at("obj_iou").get<double>(), 0.5);
}

TEST_F(Cli, EvaluateSkipsScenesWithoutGroundTruth) {
  ASSERT_EQ(run("gen --seed 3 --out " + p("s")), 0);
  ASSERT_EQ(run("gen --seed 4 --out " + p("t")), 0);
  json m = read_json(dir_ / "t" / "manifest.json");
  m.erase("ground_truth");
  write_json(dir_ / "t" / "manifest.json", m);
  ASSERT_EQ(run("pipeline --scene " + p("s") + " --out " + p("a.json")), 0);
  ASSERT_EQ(run("pipeline --scene " + p("t") + " --out " + p("b.json")), 0);
  ASSERT_EQ(run("evaluate --scenes " + p("s") + " " + p("t") + " --predictions " + p("a.json") + " " + p("b.json") +
                " --out " + p("e.json")),
            0);
  const json e = read_json(dir_ / "e.json");
  EXPECT_EQ(e.at("scenes").size(), 1u);
  EXPECT_EQ(e.at("skipped"), json({"t"}));
  EXPECT_EQ(e.at("warnings").size(), 1u);
  EXPECT_EQ(run("evaluate --scenes " + p("s") + " --predictions " + p("a.json") + " " + p("b.json") + " --out " +
                p("e.json")),
            2);
}

TEST_F(Cli, SlotDiff) {
  ASSERT_EQ(run("gen --seed 5 --composite --out " + p("s")), 0);
  ASSERT_EQ(run("slot-diff --start " + p("s/composite_start.png") + " --end " + p("s/composite_end.png") +
                    " --gt " + p("s/composite_gt.png") + " --out " + p("m.png"),
                dir_ / "out.json"),
            0);
  const json r = json::parse(slurp(dir_ / "out.json"));
  EXPECT_EQ(r.at("f1").get<double>(), 1.0);
  EXPECT_EQ(r.at("iou").get<double>(), 1.0);
  EXPECT_EQ(r.at("threshold").get<int>(), 50);

  ASSERT_EQ(run("slot-diff --start " + p("s/composite_start.png") + " --end " + p("s/composite_start.png") +
                    " --out " + p("e.png"),
                dir_ / "same.json"),
            0);
  const json same = json::parse(slurp(dir_ / "same.json"));
  EXPECT_EQ(same.at("area").get<int>(), 0);
  EXPECT_FALSE(same.contains("f1"));

  ASSERT_EQ(run("gen --seed 5 --width 320 --height 240 --out " + p("small")), 0);
  EXPECT_EQ(run("slot-diff --start " + p("s/composite_start.png") + " --end " + p("small/robot_gray.png") +
                " --out " + p("x.png")),
            1);
}

TEST_F(Cli, RegisterAndLift) {
  ASSERT_EQ(run("gen --seed 6 --out " + p("s")), 0);
  ASSERT_EQ(run("register --correspondences " + p("s/corr_object_human_motion.json") + " --scene " + p("s"),
                dir_ / "reg.json"),
            0);
  const json reg = json::parse(slurp(dir_ / "reg.json"));
  EXPECT_EQ(reg.at("status"), "ok");
  EXPECT_EQ(reg.at("result").at("inlier_indices").size(), 100u);
  EXPECT_EQ(run("register --correspondences " + p("s/corr_object_human_motion.json")), 2);

  ASSERT_EQ(run("lift --depth " + p("s/robot_depth.png") + " --intrinsics " + p("s/robot_intrinsics.json") +
                " --mask " + p("s/object_robot.png") + " --out " + p("o.ply")),
            0);
  const std::string ply = slurp(dir_ / "o.ply");
  EXPECT_EQ(ply.substr(0, 3), "ply");
  EXPECT_EQ(run("lift --depth " + p("missing.png") + " --intrinsics " + p("s/robot_intrinsics.json") + " --out " +
                p("o.ply")),
            1);
}

}  // namespace
