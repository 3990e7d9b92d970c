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

#include "refseg/evaluators.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iostream>

#include "refseg/errors.h"
#include "refseg/parallel.h"
#include "refseg/prompts.h"

namespace refseg {

std::optional<bool> NormalizeBinary(std::string_view raw) {
  size_t i = 0;
  while (i < raw.size() && !std::isalpha(static_cast<unsigned char>(raw[i]))) ++i;
  std::string token;
  while (i < raw.size() && std::isalpha(static_cast<unsigned char>(raw[i]))) {
    token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i]))));
    ++i;
  }
  if (token == "yes") return true;
  if (token == "no") return false;
  return std::nullopt;
}

BinaryDecision DecideBinary(MllmBackend& mllm, std::span<const RgbImage> images,
                            const std::string& prompt) {
  BinaryDecision d;
  for (d.attempts = 1; d.attempts <= 2; ++d.attempts) {
    d.raw = mllm.Complete(images, prompt);
    if (auto v = NormalizeBinary(d.raw)) {
      d.value = *v;
      return d;
    }
  }
  d.attempts = 2;
  d.value = false;
  d.anomalous = true;
  std::cerr << "[refseg] warning: " << mllm.id()
            << " gave no yes/no answer twice, treating as 'no': \"" << d.raw
            << "\"\n";
  return d;
}

BinaryDecision DecideT2t(const ReferenceText& ref, const CandidateText& cand,
                         const Expression& expression, MllmBackend& mllm) {
  return DecideBinary(mllm, {}, RenderT2tPrompt(expression.text(), ref.text, cand.text));
}

BinaryDecision DecideT2i(const ReferenceText& ref, const VisualPromptSet& prompts,
                         const std::vector<PromptKind>& kinds,
                         const Expression& expression, MllmBackend& mllm) {
  std::vector<RgbImage> images;
  for (PromptKind k : kinds) {
    const RgbImage* img = prompts.Find(k);
    if (img == nullptr) {
      throw ConfigError("comparison prompt needs a '" + std::string(KindName(k)) +
                        "' visual prompt");
    }
    images.push_back(*img);
  }
  return DecideBinary(mllm, images,
                      RenderT2iPrompt(expression.text(), ref.text, kinds));
}

double CosineSimilarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size() || a.empty()) {
    throw InvalidInputError("cosine of vectors with different dimensions");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {
double ClampUnit(double v) {
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, 0.0, 1.0);
}
}  // namespace

double ScoreT2t(const ReferenceText& ref, const CandidateText& cand,
                Embedder& embedder) {
  const auto a = embedder.EmbedText(ref.text);
  const auto b = embedder.EmbedText(cand.text);
  return ClampUnit(CosineSimilarity(a, b));
}

double ScoreT2i(const ReferenceText& ref, const RgbImage& mask_cropped,
                Embedder& embedder) {
  const auto a = embedder.EmbedText(ref.text);
  const auto b = embedder.EmbedImage(mask_cropped);
  return ClampUnit(CosineSimilarity(a, b));
}

nlohmann::json EvaluationRecord::ToJson() const {
  return {{"proposal_id", proposal_id}, {"d_t2t", d_t2t}, {"d_t2i", d_t2i},
          {"s_t2t", s_t2t},             {"s_t2i", s_t2i}, {"anomalies", anomalies}};
}

std::vector<EvaluationRecord> EvaluateAll(
    const MaskProposalSet& proposals, const RgbImage& image,
    const Expression& expression, const ReferenceText& ref,
    const std::vector<CandidateText>& candidates,
    const std::vector<VisualPromptSet>& prompt_sets,
    const std::vector<PromptKind>& kinds, MllmBackend& mllm,
    Embedder& embedder, int in_flight) {
  const size_t n = proposals.size();
  if (candidates.size() != n || prompt_sets.size() != n) {
    throw InvalidInputError("need one candidate text and prompt set per proposal");
  }
  for (size_t i = 0; i < n; ++i) {
    if (candidates[i].proposal_id != proposals.proposals[i].id) {
      throw InvalidInputError("candidate text order does not match proposals");
    }
  }
  std::vector<EvaluationRecord> records(n);
  ParallelFor(n, in_flight, [&](size_t i) {
    const MaskProposal& p = proposals.proposals[i];
    EvaluationRecord r;
    r.proposal_id = p.id;
    const BinaryDecision t2t = DecideT2t(ref, candidates[i], expression, mllm);
    const BinaryDecision t2i = DecideT2i(ref, prompt_sets[i], kinds, expression, mllm);
    r.d_t2t = t2t.value;
    r.d_t2i = t2i.value;
    r.anomalies = int{t2t.anomalous} + int{t2i.anomalous};
    r.s_t2t = ScoreT2t(ref, candidates[i], embedder);
    if (const RgbImage* crop = prompt_sets[i].Find(PromptKind::kMaskCropped)) {
      r.s_t2i = ScoreT2i(ref, *crop, embedder);
    } else {
      r.s_t2i = ScoreT2i(ref, RenderMaskCropped(image, p.mask), embedder);
    }
    records[i] = r;
  });
  return records;
}

}  // namespace refseg
