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

#include "refseg/attribute_prompting.h"

#include "refseg/errors.h"
#include "refseg/hashing.h"
#include "refseg/parallel.h"
#include "refseg/prompts.h"

namespace refseg {
namespace {

std::string Trim(const std::string& s) {
  const char* ws = " \t\r\n\f\v";
  const size_t b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// One retry on an empty completion, then failure. Backend transport
// retries happen below this layer.
std::string CompleteNonEmpty(MllmBackend& mllm, std::span<const RgbImage> images,
                             const std::string& prompt) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string text = CleanCompletion(mllm.Complete(images, prompt));
    if (!text.empty()) return text;
  }
  throw BackendError(mllm.id() + " returned an empty completion twice",
                     /*retryable=*/false);
}

}  // namespace

Expression::Expression(const std::string& text) : text_(Trim(text)) {
  if (text_.empty()) throw InvalidInputError("expression is empty");
}

nlohmann::json Provenance::ToJson() const {
  return {{"expression_hash", expression_hash},
          {"image_hash", image_hash},
          {"backend_id", backend_id},
          {"template_version", template_version}};
}

std::string CleanCompletion(const std::string& raw) {
  std::string s = Trim(raw);
  const size_t nl = s.find('\n');
  if (nl != std::string::npos) s = Trim(s.substr(0, nl));
  return s;
}

ReferenceText GenerateReferenceText(const RgbImage& image,
                                    const Expression& expression,
                                    MllmBackend& mllm, CompletionCache& cache) {
  ReferenceText ref;
  ref.provenance = {Sha256Hex(expression.text()), ImageHash(image), mllm.id(),
                    GetTemplate(TemplateId::kRef).version()};
  const nlohmann::json key = {
      {"kind", "ref"},
      {"backend_id", ref.provenance.backend_id},
      {"template_version", ref.provenance.template_version},
      {"image_hash", ref.provenance.image_hash},
      {"expression_hash", ref.provenance.expression_hash}};
  if (auto hit = cache.Get(mllm.id(), key)) {
    ref.text = *hit;
    return ref;
  }
  const std::vector<RgbImage> images = {image};
  ref.text = CompleteNonEmpty(mllm, images, RenderReferencePrompt(expression.text()));
  cache.Put(mllm.id(), key, ref.text);
  return ref;
}

CandidateText GenerateCandidateText(int proposal_id,
                                    const VisualPromptSet& prompts,
                                    const std::vector<PromptKind>& kinds,
                                    MllmBackend& mllm, CompletionCache& cache) {
  std::vector<RgbImage> images;
  std::vector<std::string> hashes;
  for (PromptKind k : kinds) {
    const RgbImage* img = prompts.Find(k);
    if (img == nullptr) {
      throw ConfigError("candidate prompt needs a '" + std::string(KindName(k)) +
                        "' visual prompt");
    }
    images.push_back(*img);
    hashes.push_back(ImageHash(*img));
  }
  std::string joined;
  for (const auto& h : hashes) joined += h;

  CandidateText cand;
  cand.proposal_id = proposal_id;
  cand.provenance = {Sha256Hex(""), Sha256Hex(joined), mllm.id(),
                     GetTemplate(TemplateId::kCan).version()};
  const nlohmann::json key = {
      {"kind", "can"},
      {"backend_id", cand.provenance.backend_id},
      {"template_version", cand.provenance.template_version},
      {"views", JoinKinds(kinds)},
      {"image_hashes", hashes}};
  if (auto hit = cache.Get(mllm.id(), key)) {
    cand.text = *hit;
    return cand;
  }
  cand.text = CompleteNonEmpty(mllm, images, RenderCandidatePrompt(kinds));
  cache.Put(mllm.id(), key, cand.text);
  return cand;
}

CandidateText GenerateCombinedCandidateText(const BinaryMask& combined,
                                            const RgbImage& image,
                                            const std::vector<PromptKind>& kinds,
                                            const RenderOptions& options,
                                            MllmBackend& mllm,
                                            CompletionCache& cache) {
  const VisualPromptSet prompts = RenderPromptSet(image, combined, kinds, options);
  return GenerateCandidateText(kCombinedProposalId, prompts, kinds, mllm, cache);
}

std::vector<CandidateText> GenerateCandidateTexts(
    const std::vector<VisualPromptSet>& prompt_sets,
    const std::vector<PromptKind>& kinds, MllmBackend& mllm,
    CompletionCache& cache, int in_flight) {
  std::vector<CandidateText> out(prompt_sets.size());
  ParallelFor(prompt_sets.size(), in_flight, [&](size_t i) {
    out[i] = GenerateCandidateText(static_cast<int>(i), prompt_sets[i], kinds,
                                   mllm, cache);
  });
  return out;
}

}  // namespace refseg
