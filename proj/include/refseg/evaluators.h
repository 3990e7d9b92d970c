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

#ifndef REFSEG_EVALUATORS_H_
#define REFSEG_EVALUATORS_H_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "refseg/attribute_prompting.h"
#include "refseg/backends.h"
#include "refseg/mask.h"
#include "refseg/visual_prompts.h"

namespace refseg {

// Case-insensitive look at the first alphabetic token: "yes" -> true,
// "no" -> false, anything else -> nullopt.
std::optional<bool> NormalizeBinary(std::string_view raw);

struct BinaryDecision {
  bool value = false;
  int attempts = 0;
  // True when neither attempt produced yes/no and `value` fell back to false.
  bool anomalous = false;
  std::string raw;  // last completion seen
};

// Asks once, re-asks once on an unparseable answer, then rejects.
BinaryDecision DecideBinary(MllmBackend& mllm, std::span<const RgbImage> images,
                            const std::string& prompt);

BinaryDecision DecideT2t(const ReferenceText& ref, const CandidateText& cand,
                         const Expression& expression, MllmBackend& mllm);
// Sends the `kinds` variants of `prompts` with the comparison prompt.
BinaryDecision DecideT2i(const ReferenceText& ref, const VisualPromptSet& prompts,
                         const std::vector<PromptKind>& kinds,
                         const Expression& expression, MllmBackend& mllm);

double CosineSimilarity(std::span<const float> a, std::span<const float> b);
// Cosine clamped to [0, 1].
double ScoreT2t(const ReferenceText& ref, const CandidateText& cand,
                Embedder& embedder);
double ScoreT2i(const ReferenceText& ref, const RgbImage& mask_cropped,
                Embedder& embedder);

struct EvaluationRecord {
  int proposal_id = 0;
  bool d_t2t = false;
  bool d_t2i = false;
  double s_t2t = 0.0;
  double s_t2i = 0.0;
  int anomalies = 0;  // decisions that fell back to "no"

  double score_sum() const { return s_t2t + s_t2i; }
  nlohmann::json ToJson() const;
  bool operator==(const EvaluationRecord&) const = default;
};

// One record per proposal, in proposal-id order. `prompt_sets[i]` and
// `candidates[i]` belong to proposal i. The text-to-image score always uses
// the mask-cropped render, produced from `image` when absent from the set.
// Any failing sub-call aborts the whole evaluation.
std::vector<EvaluationRecord> EvaluateAll(
    const MaskProposalSet& proposals, const RgbImage& image,
    const Expression& expression, const ReferenceText& ref,
    const std::vector<CandidateText>& candidates,
    const std::vector<VisualPromptSet>& prompt_sets,
    const std::vector<PromptKind>& kinds, MllmBackend& mllm,
    Embedder& embedder, int in_flight = 8);

}  // namespace refseg

#endif  // REFSEG_EVALUATORS_H_
