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

#include "refseg/pipeline.h"

#include <mutex>

#include "refseg/errors.h"
#include "refseg/parallel.h"

namespace refseg {

void PipelineConfig::Validate() const {
  segmenter.Validate();
  if (kinds.empty()) throw ConfigError("visual_prompt_kinds must not be empty");
  if (kinds.size() > static_cast<size_t>(kMaxImagesPerRequest)) {
    throw ConfigError("at most 4 visual prompt kinds fit in one request");
  }
  for (size_t i = 0; i < kinds.size(); ++i) {
    for (size_t j = i + 1; j < kinds.size(); ++j) {
      if (kinds[i] == kinds[j]) throw ConfigError("visual prompt kinds must be unique");
    }
  }
  if (in_flight < 1) throw ConfigError("in_flight must be >= 1");
}

nlohmann::json PipelineConfig::ToJson() const {
  return {{"segmenter", segmenter.ToJson()},
          {"visual_prompt_kinds", JoinKinds(kinds)},
          {"render",
           {{"bbox_line_width", render.bbox_line_width},
            {"contour_line_width", render.contour_line_width},
            {"blur_radius", render.blur_radius}}},
          {"selection",
           {{"threshold", selection.threshold},
            {"mode", SelectorModeName(selection.mode)},
            {"allow_combined", selection.allow_combined}}}};
}

PipelineConfig PipelineConfig::FromJson(const nlohmann::json& j) {
  PipelineConfig c;
  try {
    if (j.contains("segmenter")) c.segmenter = SegmenterConfig::FromJson(j["segmenter"]);
    if (j.contains("visual_prompt_kinds")) {
      c.kinds = ParseKinds(j["visual_prompt_kinds"].get<std::string>());
    }
    if (j.contains("render")) {
      const auto& r = j["render"];
      c.render.bbox_line_width = r.value("bbox_line_width", c.render.bbox_line_width);
      c.render.contour_line_width =
          r.value("contour_line_width", c.render.contour_line_width);
      c.render.blur_radius = r.value("blur_radius", c.render.blur_radius);
    }
    if (j.contains("selection")) {
      const auto& s = j["selection"];
      c.selection.threshold = s.value("threshold", c.selection.threshold);
      if (s.contains("mode")) c.selection.mode = ParseSelectorMode(s["mode"].get<std::string>());
      c.selection.allow_combined = s.value("allow_combined", c.selection.allow_combined);
    }
    c.in_flight = j.value("in_flight", c.in_flight);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad pipeline config: ") + e.what());
  }
  return c;
}

nlohmann::json SampleOutput::TextsToJson() const {
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& c : candidates) {
    cands.push_back({{"proposal_id", c.proposal_id},
                     {"text", c.text},
                     {"provenance", c.provenance.ToJson()}});
  }
  nlohmann::json combined = nlohmann::json::array();
  for (size_t i = 0; i < combined_candidates.size(); ++i) {
    combined.push_back({{"proposal_id", combined_candidates[i].proposal_id},
                        {"text", combined_candidates[i].text},
                        {"s_t2t", combined_scores[i].s_t2t},
                        {"s_t2i", combined_scores[i].s_t2i},
                        {"provenance", combined_candidates[i].provenance.ToJson()}});
  }
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) recs.push_back(r.ToJson());
  return {{"reference", {{"text", reference.text},
                         {"provenance", reference.provenance.ToJson()}}},
          {"candidates", cands},
          {"combined_candidates", combined},
          {"records", recs}};
}

Pipeline::Pipeline(PipelineConfig config, Backends backends,
                   std::shared_ptr<CompletionCache> cache)
    : config_(std::move(config)),
      backends_(std::move(backends)),
      cache_(cache ? std::move(cache) : std::make_shared<CompletionCache>()) {
  config_.Validate();
  if (!backends_.mllm || !backends_.embedder) {
    throw ConfigError("pipeline needs an mllm and an embedder backend");
  }
}

MaskProposalSet Pipeline::Propose(const std::string& image_id,
                                  const RgbImage& image) {
  if (!backends_.segmenter) throw ConfigError("no segmenter backend configured");
  return GenerateProposals(image_id, image, *backends_.segmenter, config_.segmenter);
}

SampleOutput Pipeline::Run(const std::string& image_id, const RgbImage& image,
                           const Expression& expression) {
  return Run(image, expression, Propose(image_id, image));
}

SampleOutput Pipeline::Run(const RgbImage& image, const Expression& expression,
                           MaskProposalSet proposals) {
  if (proposals.width != image.width() || proposals.height != image.height()) {
    throw DimensionError("proposal grid does not match the image");
  }
  MllmBackend& mllm = *backends_.mllm;
  Embedder& embedder = *backends_.embedder;

  SampleOutput out;
  out.proposals = std::move(proposals);
  out.reference = GenerateReferenceText(image, expression, mllm, *cache_);

  std::vector<VisualPromptSet> prompt_sets(out.proposals.size());
  ParallelFor(prompt_sets.size(), config_.in_flight, [&](size_t i) {
    prompt_sets[i] = RenderPromptSet(image, out.proposals.proposals[i].mask,
                                     config_.kinds, config_.render);
  });
  out.candidates =
      GenerateCandidateTexts(prompt_sets, config_.kinds, mllm, *cache_, config_.in_flight);
  out.records = EvaluateAll(out.proposals, image, expression, out.reference,
                            out.candidates, prompt_sets, config_.kinds, mllm,
                            embedder, config_.in_flight);

  const CombinedScorer scorer = [&](const BinaryMask& combined) {
    CandidateText text = GenerateCombinedCandidateText(
        combined, image, config_.kinds, config_.render, mllm, *cache_);
    CombinedScores s;
    s.s_t2t = ScoreT2t(out.reference, text, embedder);
    s.s_t2i = ScoreT2i(out.reference, RenderMaskCropped(image, combined), embedder);
    out.combined_candidates.push_back(std::move(text));
    out.combined_scores.push_back(s);
    return s;
  };
  out.result = Select(out.proposals, out.records, out.reference, scorer,
                      config_.selection);
  return out;
}

}  // namespace refseg
