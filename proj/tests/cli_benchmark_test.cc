/* Copyright 2026 The refseg Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "refseg/benchmark.h"
#include "refseg/cli.h"
#include "refseg/image.h"
#include "refseg/pipeline.h"
#include "synthetic_run.h"
#include "test_util.h"

namespace refseg {
namespace {

namespace fs = std::filesystem;
using test::Cli;
using test::Slurp;

TEST(BenchmarkTest, SyntheticScores) {
  const auto r = test::RunSynthetic(test::TempDir("bench"));
  ASSERT_EQ(r.runs.size(), 1u);
  const EvalReport& rep = r.runs[0];
  ASSERT_EQ(rep.per_sample.size(), 5u);
  EXPECT_EQ(rep.scored, 5);
  EXPECT_EQ(rep.errors, 0);
  const auto& rows = rep.per_sample;
  EXPECT_EQ(rows[0].sample_id, "chair");
  EXPECT_EQ(rows[0].iou, 1.0);
  EXPECT_EQ(rows[1].source, "combined");
  EXPECT_EQ(rows[1].chosen_ids, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(rows[1].iou, 1.0);
  EXPECT_EQ(rows[2].outcome, "explanation");
  EXPECT_EQ(rows[2].iou, 1.0);
  EXPECT_EQ(rows[3].iou, 1.0);
  EXPECT_EQ(rows[4].tier, "t2t_only");
  EXPECT_DOUBLE_EQ(rows[4].iou, 600.0 / 660.0);
  // gIoU = (4 + 600/660) / 5; cIoU = sums over the four masked samples
  EXPECT_DOUBLE_EQ(rep.giou, (4.0 + 600.0 / 660.0) / 5.0);
  const double inter = 1200 + 96 + 1200 + 600, uni = 1200 + 96 + 1200 + 660;
  EXPECT_DOUBLE_EQ(rep.ciou, inter / uni);
  EXPECT_EQ(r.run_id, r.fingerprint.substr(0, 16));
}

TEST(BenchmarkTest, RepeatsAreIdentical) {
  const auto r = test::RunSynthetic(test::TempDir("bench_rep"),
                                    [](RunConfig& c) { c.repeats = 2; });
  ASSERT_EQ(r.runs.size(), 2u);
  EXPECT_EQ(r.runs[0].ToJson(), r.runs[1].ToJson());
  EXPECT_EQ(r.mean_giou, r.runs[0].giou);
  const auto again = test::RunSynthetic(test::TempDir("bench_rep2"),
                                        [](RunConfig& c) { c.repeats = 2; });
  EXPECT_EQ(again.Serialize(), r.Serialize());
}

TEST(BenchmarkTest, WorkerCountDoesNotChangeReport) {
  const auto one = test::RunSynthetic(test::TempDir("bench_w1"), [](RunConfig& c) { c.workers = 1; });
  const auto many = test::RunSynthetic(test::TempDir("bench_w8"), [](RunConfig& c) { c.workers = 8; });
  EXPECT_EQ(one.Serialize(), many.Serialize());
}

TEST(BenchmarkTest, PoisonedSampleIsRecorded) {
  const auto r = test::RunSynthetic(test::TempDir("bench_poison"), {},
                                    [](std::vector<Sample>& s) { s[3].image_path += ".missing"; });
  const EvalReport& rep = r.runs[0];
  EXPECT_EQ(rep.scored, 4);
  EXPECT_EQ(rep.errors, 1);
  EXPECT_FALSE(rep.per_sample[3].scored);
  EXPECT_FALSE(rep.per_sample[3].error.empty());
  EXPECT_DOUBLE_EQ(rep.giou, (3.0 + 600.0 / 660.0) / 4.0);
}

TEST(BenchmarkTest, SkipPolicyDropsNoTargetSample) {
  const auto r = test::RunSynthetic(test::TempDir("bench_skip"), [](RunConfig& c) {
    c.no_target = NoTargetPolicy::kSkip;
  });
  EXPECT_EQ(r.runs[0].scored, 4);
  EXPECT_EQ(r.runs[0].errors, 0);
  EXPECT_FALSE(r.runs[0].per_sample[2].scored);
}

TEST(BenchmarkTest, StopRequestLeavesPartialReport) {
  RequestStop();
  const auto r = test::RunSynthetic(test::TempDir("bench_stop"));
  ClearStop();
  EXPECT_TRUE(r.interrupted);
  EXPECT_EQ(r.runs.at(0).per_sample.size(), 5u);
}

TEST(BenchmarkTest, VisualPromptAblationRows) {
  const auto rows = VisualPromptAblation();
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[1], (std::vector<PromptKind>{PromptKind::kOriginal, PromptKind::kMaskCropped}));
  for (const auto& kinds : rows) {
    PipelineConfig c;
    c.kinds = kinds;
    EXPECT_NO_THROW(c.Validate());
    const auto r = test::RunSynthetic(test::TempDir("ablate"),
                                      [&](RunConfig& rc) { rc.pipeline.kinds = kinds; });
    EXPECT_EQ(r.runs[0].errors, 0) << JoinKinds(kinds);
  }
}

TEST(PipelineConfigTest, JsonAndValidation) {
  PipelineConfig c;
  c.kinds = {PromptKind::kBlur, PromptKind::kBbox};
  c.selection.threshold = 0.5;
  c.selection.mode = SelectorMode::kClipOnly;
  c.render.blur_radius = 3;
  const PipelineConfig back = PipelineConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.ToJson(), c.ToJson());
  c.kinds = {};
  EXPECT_THROW(c.Validate(), ConfigError);
  c.kinds = {PromptKind::kBlur, PromptKind::kBlur};
  EXPECT_THROW(c.Validate(), ConfigError);
  c.kinds = {PromptKind::kBlur};
  c.in_flight = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
}

TEST(ConfigTest, FingerprintTracksContent) {
  const std::string dir = test::TempDir("fp");
  synthetic::WriteFixtures(dir);
  RunConfig a = RunConfig::FromFile(dir + "/backends.json");
  const std::string fp = a.Fingerprint();
  EXPECT_EQ(fp.size(), 64u);
  RunConfig b = a;
  b.output_dir = "elsewhere";
  b.workers = 13;
  b.cache_dir = "/tmp/x";
  EXPECT_EQ(b.Fingerprint(), fp);
  b.pipeline.selection.threshold = 0.9;
  EXPECT_NE(b.Fingerprint(), fp);
  std::ofstream(dir + "/mllm_script.json", std::ios::app) << " ";
  EXPECT_NE(a.Fingerprint(), fp);
  // the same fixtures in another directory fingerprint the same
  const std::string other = test::TempDir("fp2");
  synthetic::WriteFixtures(other);
  synthetic::WriteFixtures(dir);
  EXPECT_EQ(RunConfig::FromFile(other + "/backends.json").Fingerprint(), fp);
  EXPECT_THROW(RunConfig::FromJson({{"backends", nlohmann::json::array()}}, ".").Validate(),
               ConfigError);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = test::TempDir("cli_" + std::string(
        ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    synthetic::WriteFixtures(dir_ + "/syn");
    config_ = dir_ + "/syn/backends.json";
  }
  std::string Image(const std::string& id) const { return dir_ + "/syn/images/" + id + ".png"; }

  std::string dir_;
  std::string config_;
};

TEST_F(CliTest, SegmentMaskOutcome) {
  const auto r = Cli({"segment", "--config", config_, "--image", Image("chair"), "--expression",
                      "mesh backrest", "--out", dir_ + "/o"});
  EXPECT_EQ(r.code, kExitMask) << r.err;
  EXPECT_TRUE(fs::exists(dir_ + "/o/overlay.png"));
  EXPECT_FALSE(fs::exists(dir_ + "/o/explanation.json"));
  const auto res = nlohmann::json::parse(Slurp(dir_ + "/o/result.json"));
  EXPECT_EQ(res["result"]["outcome"], "mask");
  EXPECT_EQ(Area(MaskFromJson(res["result"]["mask"])), 1200);
  const auto texts = nlohmann::json::parse(Slurp(dir_ + "/o/texts.json"));
  EXPECT_TRUE(texts.contains("reference"));
  const RgbImage overlay = LoadImage(dir_ + "/o/overlay.png");
  EXPECT_EQ(overlay.width(), 100);
}

TEST_F(CliTest, SegmentExplanationOutcome) {
  fs::create_directories(dir_ + "/o");
  std::ofstream(dir_ + "/o/overlay.png") << "stale";
  const auto r = Cli({"segment", "--config", config_, "--image", Image("room"), "--expression",
                      "the cat sleeping on the sofa", "--out", dir_ + "/o"});
  EXPECT_EQ(r.code, kExitExplanation) << r.err;
  EXPECT_FALSE(fs::exists(dir_ + "/o/overlay.png"));
  const auto e = nlohmann::json::parse(Slurp(dir_ + "/o/explanation.json"));
  EXPECT_NE(e["explanation"].get<std::string>().find("no cat"), std::string::npos);
}

TEST_F(CliTest, InputAndConfigErrors) {
  EXPECT_EQ(Cli({"segment", "--config", config_, "--image", dir_ + "/nope.png", "--expression",
                 "x", "--out", dir_ + "/o"})
                .code,
            kExitConfigError);
  EXPECT_EQ(Cli({"segment", "--config", config_, "--image", Image("chair"), "--expression", " ",
                 "--out", dir_ + "/o"})
                .code,
            kExitConfigError);
  EXPECT_EQ(Cli({"segment", "--image", Image("chair"), "--expression", "x"}).code,
            kExitConfigError);
  EXPECT_EQ(Cli({"segment", "--config", config_, "--image", Image("chair"), "--expression",
                 "mesh backrest", "--kinds", "mask,sparkle", "--out", dir_ + "/o"})
                .code,
            kExitConfigError);
  EXPECT_EQ(Cli({"frobnicate"}).code, kExitConfigError);
  EXPECT_EQ(Cli({"--help"}).code, 0);
}

TEST_F(CliTest, UnscriptedPromptIsBackendError) {
  // a script with no default and no rules cannot answer anything
  std::ofstream(dir_ + "/empty_script.json") << R"({"rules": []})";
  nlohmann::json cfg = nlohmann::json::parse(Slurp(config_));
  cfg["backends"][0]["endpoint"] = "mock:" + dir_ + "/empty_script.json";
  cfg["backends"][2]["endpoint"] = "mock:" + dir_ + "/syn/fixtures";
  cfg["fixtures"] = dir_ + "/syn/fixtures";
  cfg["dataset"]["path"] = dir_ + "/syn/dataset.json";
  std::ofstream(dir_ + "/bad.json") << cfg.dump();
  const auto r = Cli({"segment", "--config", dir_ + "/bad.json", "--image", Image("chair"),
                      "--expression", "mesh backrest", "--out", dir_ + "/o"});
  EXPECT_EQ(r.code, kExitBackendError) << r.err;
}

TEST_F(CliTest, EvalPrintsReportedScores) {
  const auto r = Cli({"eval", "--format", "synthetic", "--dataset", dir_ + "/syn", "--out",
                      dir_ + "/out"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string path = test::ReportPath(r.out);
  ASSERT_TRUE(fs::exists(path)) << r.out;
  const auto rep = nlohmann::json::parse(Slurp(path));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * rep["mean_giou"].get<double>());
  EXPECT_NE(r.out.find(buf), std::string::npos) << r.out;
  EXPECT_EQ(fs::path(path).filename().string(),
            rep["run_id"].get<std::string>() + ".report.json");
  // flags override the config file
  const auto no_union = Cli({"eval", "--format", "synthetic", "--dataset", dir_ + "/syn",
                             "--out", dir_ + "/out2", "--no-combined"});
  ASSERT_EQ(no_union.code, 0) << no_union.err;
  const auto rep2 = nlohmann::json::parse(Slurp(test::ReportPath(no_union.out)));
  EXPECT_LT(rep2["mean_giou"].get<double>(), rep["mean_giou"].get<double>());
  EXPECT_NE(rep2["config_fingerprint"], rep["config_fingerprint"]);
}

TEST_F(CliTest, RenderWritesOnePngPerKind) {
  const std::string fixture = dir_ + "/syn/fixtures/chair.json";
  const auto r = Cli({"render", "--image", Image("chair"), "--mask", fixture, "--kinds",
                      "original,mask_cropped,bbox,contour,blur", "--out", dir_ + "/r1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto r2 = Cli({"render", "--image", Image("chair"), "--mask", fixture, "--kinds",
                       "original,mask_cropped,bbox,contour,blur", "--out", dir_ + "/r2"});
  ASSERT_EQ(r2.code, 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir_ + "/r1")) {
    ++files;
    EXPECT_EQ(Slurp(e.path()), Slurp(dir_ + "/r2/" + e.path().filename().string()));
  }
  const int masks = static_cast<int>(
      nlohmann::json::parse(Slurp(fixture))["masks"].size());
  EXPECT_EQ(files, 5 * masks);
  EXPECT_TRUE(fs::exists(dir_ + "/r1/chair_0_bbox.png"));

  std::ofstream(dir_ + "/small.json") << MaskToJson(BinaryMask::Full(3, 3)).dump();
  EXPECT_EQ(Cli({"render", "--image", Image("chair"), "--mask", dir_ + "/small.json", "--out",
                 dir_ + "/r3"})
                .code,
            kExitConfigError);
}

TEST_F(CliTest, CacheListAndPurge) {
  const std::string cache = dir_ + "/cache";
  ASSERT_EQ(Cli({"eval", "--format", "synthetic", "--dataset", dir_ + "/syn", "--out",
                 dir_ + "/out", "--cache-dir", cache})
                .code,
            0);
  const auto list = Cli({"cache", "list", "--cache-dir", cache});
  ASSERT_EQ(list.code, 0) << list.err;
  CompletionCache c(cache);
  const size_t n = c.List().size();
  EXPECT_GT(n, 5u);
  EXPECT_NE(list.out.find(std::to_string(n) + " entries"), std::string::npos) << list.out;
  EXPECT_NE(list.out.find("mock-mllm "), std::string::npos);
  const auto none = Cli({"cache", "list", "--cache-dir", cache, "--backend", "other"});
  EXPECT_NE(none.out.find("0 entries"), std::string::npos) << none.out;
  // a second run is served from the cache and scores the same
  const auto again = Cli({"eval", "--format", "synthetic", "--dataset", dir_ + "/syn", "--out",
                          dir_ + "/out_again", "--cache-dir", cache});
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(Slurp(test::ReportPath(again.out)),
            Slurp(dir_ + "/out/" + fs::path(test::ReportPath(again.out)).filename().string()));
  const auto purge = Cli({"cache", "purge", "--cache-dir", cache, "--backend", "mock-mllm"});
  EXPECT_NE(purge.out.find("purged " + std::to_string(n) + " entries"), std::string::npos)
      << purge.out;
  EXPECT_TRUE(c.List().empty());
}

}  // namespace
}  // namespace refseg
