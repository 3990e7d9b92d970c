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

#ifndef REFSEG_BENCHMARK_H_
#define REFSEG_BENCHMARK_H_

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "refseg/backends.h"
#include "refseg/cache.h"
#include "refseg/dataset.h"
#include "refseg/metrics.h"
#include "refseg/pipeline.h"

namespace refseg {

struct BenchmarkOptions {
  int workers = 4;
  int repeats = 1;
  // Proposals come from {fixtures_dir}/{image_id}.json when set.
  std::string fixtures_dir;
  NoTargetPolicy no_target = NoTargetPolicy::kScoreRejection;
  std::string fingerprint;
};

struct BenchmarkResult {
  std::string run_id;
  std::string fingerprint;
  std::vector<EvalReport> runs;
  double mean_giou = 0.0;
  double mean_ciou = 0.0;
  bool interrupted = false;

  nlohmann::json ToJson() const;
  // Indented JSON plus a trailing newline; stable for equal inputs.
  std::string Serialize() const;
  std::string Table() const;
};

// Cooperative stop: samples not yet started are recorded as errors and the
// partial report is still produced.
void RequestStop();
bool StopRequested();
void ClearStop();

// Scores every sample with a fresh pipeline. Per-sample failures become
// error rows; only ConfigError propagates. The configured cache serves the
// first repeat, later repeats regenerate texts with an in-memory cache.
BenchmarkResult RunBenchmark(const std::vector<Sample>& samples,
                             const PipelineConfig& config,
                             const Backends& backends,
                             std::shared_ptr<CompletionCache> cache,
                             const BenchmarkOptions& options);

// Writes {dir}/{run_id}.report.json and returns its path.
std::string WriteReport(const BenchmarkResult& result, const std::string& dir);

// The visual prompt combinations of the prompt-kind ablation, in table order.
std::vector<std::vector<PromptKind>> VisualPromptAblation();

}  // namespace refseg

#endif  // REFSEG_BENCHMARK_H_
