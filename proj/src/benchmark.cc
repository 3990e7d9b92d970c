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

#include "refseg/benchmark.h"

#include <atomic>
#include <filesystem>
#include <fstream>

#include "refseg/errors.h"
#include "refseg/image.h"
#include "refseg/parallel.h"
#include "refseg/proposals.h"

namespace refseg {
namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_stop{false};

SampleRow ScoreSample(const Sample& s, Pipeline& pipeline,
                      const BenchmarkOptions& options) {
  SampleRow row;
  row.sample_id = s.sample_id;
  row.scored = false;
  if (StopRequested()) {
    row.error = "interrupted";
    return row;
  }
  try {
    const RgbImage image = LoadImage(s.image_path);
    if (s.gt_mask && (s.gt_mask->width() != image.width() ||
                      s.gt_mask->height() != image.height())) {
      throw DimensionError("gt mask does not match the image size");
    }
    MaskProposalSet proposals =
        options.fixtures_dir.empty()
            ? pipeline.Propose(s.image_id, image)
            : LoadFixtureProposals(
                  (fs::path(options.fixtures_dir) / (s.image_id + ".json")).string(),
                  pipeline.config().segmenter);
    const SampleOutput out = pipeline.Run(image, s.expression, std::move(proposals));
    const SampleScore score = ComputeSampleIou(out.result, s.gt_mask);
    row.intersection = score.intersection;
    row.union_area = score.union_area;
    row.iou = score.iou;
    row.outcome = OutcomeName(out.result.outcome);
    row.source = SourceName(out.result.source);
    row.tier = TierName(out.result.tier);
    row.chosen_ids = out.result.chosen_ids;
    row.scored = s.gt_mask || options.no_target == NoTargetPolicy::kScoreRejection;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    row = SampleRow{};
    row.sample_id = s.sample_id;
    row.scored = false;
    row.error = e.what();
  }
  return row;
}

EvalReport AggregateOrEmpty(std::vector<SampleRow> rows, const std::string& fp) {
  bool any = false;
  for (const auto& r : rows) any |= r.scored;
  if (any) return Aggregate(std::move(rows), fp);
  EvalReport report;
  for (const auto& r : rows) report.errors += !r.error.empty();
  report.per_sample = std::move(rows);
  report.fingerprint = fp;
  return report;
}

}  // namespace

void RequestStop() { g_stop.store(true); }
bool StopRequested() { return g_stop.load(); }
void ClearStop() { g_stop.store(false); }

nlohmann::json BenchmarkResult::ToJson() const {
  nlohmann::json runs_json = nlohmann::json::array();
  for (const auto& r : runs) runs_json.push_back(r.ToJson());
  return {{"run_id", run_id},
          {"config_fingerprint", fingerprint},
          {"repeats", runs.size()},
          {"mean_giou", mean_giou},
          {"mean_ciou", mean_ciou},
          {"interrupted", interrupted},
          {"runs", runs_json}};
}

std::string BenchmarkResult::Serialize() const { return ToJson().dump(2) + "\n"; }

std::string BenchmarkResult::Table() const {
  std::vector<TableRow> rows;
  for (size_t i = 0; i < runs.size(); ++i) {
    rows.push_back({"run " + std::to_string(i + 1), runs[i].giou, runs[i].ciou,
                    runs[i].scored, runs[i].errors});
  }
  if (runs.size() > 1) rows.push_back({"mean", mean_giou, mean_ciou, 0, 0});
  return RenderTable("run " + run_id, rows);
}

BenchmarkResult RunBenchmark(const std::vector<Sample>& samples,
                             const PipelineConfig& config,
                             const Backends& backends,
                             std::shared_ptr<CompletionCache> cache,
                             const BenchmarkOptions& options) {
  if (options.workers < 1) throw ConfigError("workers must be >= 1");
  if (options.repeats < 1) throw ConfigError("repeats must be >= 1");
  BenchmarkResult result;
  result.fingerprint = options.fingerprint;
  result.run_id = options.fingerprint.empty() ? "run" : options.fingerprint.substr(0, 16);
  for (int r = 0; r < options.repeats; ++r) {
    Pipeline pipeline(config, backends,
                      r == 0 && cache ? cache : std::make_shared<CompletionCache>());
    std::vector<SampleRow> rows(samples.size());
    ParallelFor(samples.size(), options.workers, [&](size_t i) {
      rows[i] = ScoreSample(samples[i], pipeline, options);
    });
    result.runs.push_back(AggregateOrEmpty(std::move(rows), options.fingerprint));
    if (StopRequested()) {
      result.interrupted = true;
      break;
    }
  }
  for (const auto& run : result.runs) {
    result.mean_giou += run.giou;
    result.mean_ciou += run.ciou;
  }
  result.mean_giou /= static_cast<double>(result.runs.size());
  result.mean_ciou /= static_cast<double>(result.runs.size());
  return result;
}

std::string WriteReport(const BenchmarkResult& result, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / (result.run_id + ".report.json");
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << result.Serialize();
  }
  fs::rename(tmp, path);
  return path.string();
}

std::vector<std::vector<PromptKind>> VisualPromptAblation() {
  using K = PromptKind;
  return {{K::kMaskCropped},          {K::kOriginal, K::kMaskCropped},
          {K::kOriginal, K::kContour}, {K::kBlur},
          {K::kMaskCropped, K::kBlur}, {K::kMaskCropped, K::kBbox},
          {K::kMaskCropped, K::kContour}, {K::kBbox, K::kContour}};
}

}  // namespace refseg
