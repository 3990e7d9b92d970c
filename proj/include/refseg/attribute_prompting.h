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

#ifndef REFSEG_ATTRIBUTE_PROMPTING_H_
#define REFSEG_ATTRIBUTE_PROMPTING_H_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "refseg/backends.h"
#include "refseg/cache.h"
#include "refseg/mask.h"
#include "refseg/visual_prompts.h"

namespace refseg {

// Free-form referring expression, whitespace-trimmed and non-empty.
class Expression {
 public:
  // Throws InvalidInputError when nothing is left after trimming.
  explicit Expression(const std::string& text);
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

struct Provenance {
  std::string expression_hash;
  std::string image_hash;
  std::string backend_id;
  std::string template_version;
  nlohmann::json ToJson() const;
  bool operator==(const Provenance&) const = default;
};

// Description of the expression's target, or an explanation of why it
// cannot be found.
struct ReferenceText {
  std::string text;
  Provenance provenance;
};

// Proposal id used for the union of a group of proposals.
inline constexpr int kCombinedProposalId = -1;

struct CandidateText {
  int proposal_id = 0;
  std::string text;
  Provenance provenance;
};

// Trims surrounding whitespace and cuts at the first newline.
std::string CleanCompletion(const std::string& raw);

ReferenceText GenerateReferenceText(const RgbImage& image,
                                    const Expression& expression,
                                    MllmBackend& mllm, CompletionCache& cache);

// Sends the variants for `kinds` (in that order) with the matching
// candidate prompt. Throws ConfigError when a kind is missing from
// `prompts`.
CandidateText GenerateCandidateText(int proposal_id,
                                    const VisualPromptSet& prompts,
                                    const std::vector<PromptKind>& kinds,
                                    MllmBackend& mllm, CompletionCache& cache);

// Candidate text for a union mask; rendered with `options` and tagged with
// kCombinedProposalId.
CandidateText GenerateCombinedCandidateText(const BinaryMask& combined,
                                            const RgbImage& image,
                                            const std::vector<PromptKind>& kinds,
                                            const RenderOptions& options,
                                            MllmBackend& mllm,
                                            CompletionCache& cache);

// One candidate per prompt set, `prompt_sets[i]` belonging to proposal i.
// Up to `in_flight` requests run concurrently.
std::vector<CandidateText> GenerateCandidateTexts(
    const std::vector<VisualPromptSet>& prompt_sets,
    const std::vector<PromptKind>& kinds, MllmBackend& mllm,
    CompletionCache& cache, int in_flight = 8);

}  // namespace refseg

#endif  // REFSEG_ATTRIBUTE_PROMPTING_H_
