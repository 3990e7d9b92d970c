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

#ifndef REFSEG_PIPELINE_H_
#define REFSEG_PIPELINE_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "refseg/attribute_prompting.h"
#include "refseg/backends.h"
#include "refseg/cache.h"
#include "refseg/evaluators.h"
#include "refseg/proposals.h"
#include "refseg/selection.h"
#include "refseg/visual_prompts.h"

namespace refseg {

struct PipelineConfig {
  SegmenterConfig segmenter;
  std::vector<PromptKind> kinds = DefaultKinds();
  RenderOptions render;
  SelectionOptions selection;
  int in_flight = 8;

  void Validate() const;
  nlohmann::json ToJson() const;
  static PipelineConfig FromJson(const nlohmann::json& j);
};

// Everything produced for one (image, expression) query.
struct SampleOutput {
  MaskProposalSet proposals;
  ReferenceText reference;
  std::vector<CandidateText> candidates;
  std::vector<EvaluationRecord> records;
  // Union candidates scored during selection (at most one per query).
  std::vector<CandidateText> combined_candidates;
  std::vector<CombinedScores> combined_scores;
  SelectionResult result;

  // Intermediate texts and metrics, without the result mask.
  nlohmann::json TextsToJson() const;
};

class Pipeline {
 public:
  Pipeline(PipelineConfig config, Backends backends,
           std::shared_ptr<CompletionCache> cache);

  const PipelineConfig& config() const { return config_; }
  const Backends& backends() const { return backends_; }
  CompletionCache& cache() { return *cache_; }

  // Throws ConfigError when no segmenter is configured.
  MaskProposalSet Propose(const std::string& image_id, const RgbImage& image);

  SampleOutput Run(const RgbImage& image, const Expression& expression,
                   MaskProposalSet proposals);
  SampleOutput Run(const std::string& image_id, const RgbImage& image,
                   const Expression& expression);

 private:
  PipelineConfig config_;
  Backends backends_;
  std::shared_ptr<CompletionCache> cache_;
};

}  // namespace refseg

#endif  // REFSEG_PIPELINE_H_
