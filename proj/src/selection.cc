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

#include "refseg/selection.h"

#include <algorithm>

#include "refseg/errors.h"

namespace refseg {
namespace {

void CheckRecords(const MaskProposalSet& proposals,
                  const std::vector<EvaluationRecord>& records) {
  if (records.size() != proposals.size()) {
    throw InvalidInputError("selection needs exactly one record per proposal");
  }
  for (size_t i = 0; i < records.size(); ++i) {
    if (records[i].proposal_id != proposals.proposals[i].id) {
      throw InvalidInputError("evaluation records out of proposal order");
    }
  }
}

bool Passes(const EvaluationRecord& r, Tier tier) {
  switch (tier) {
    case Tier::kBoth:
      return r.d_t2t && r.d_t2i;
    case Tier::kT2tOnly:
      return r.d_t2t;
    case Tier::kT2iOnly:
      return r.d_t2i;
    case Tier::kFallback:
      return false;
  }
  return false;
}

SelectionResult Explain(const ReferenceText& ref, double best) {
  SelectionResult r;
  r.outcome = Outcome::kExplanation;
  r.source = Source::kNone;
  r.tier = Tier::kFallback;
  r.explanation = ref.text;
  r.score = best;
  return r;
}

SelectionResult Pick(const MaskProposal& p, Source source, Tier tier, double score) {
  SelectionResult r;
  r.outcome = Outcome::kMask;
  r.mask = p.mask;
  r.source = source;
  r.tier = tier;
  r.chosen_ids = {p.id};
  r.score = score;
  return r;
}

constexpr Tier kTiers[] = {Tier::kBoth, Tier::kT2tOnly, Tier::kT2iOnly};

SelectionResult Fallback(const MaskProposalSet& proposals,
                         const std::vector<EvaluationRecord>& records,
                         const ReferenceText& ref, double threshold) {
  if (proposals.empty()) return Explain(ref, 0.0);
  size_t best = 0;
  for (size_t i = 1; i < records.size(); ++i) {
    if (records[i].score_sum() > records[best].score_sum()) best = i;
  }
  const double best_score = records[best].score_sum();
  if (best_score < threshold) return Explain(ref, best_score);
  return Pick(proposals.proposals[best], Source::kScoreFallback, Tier::kFallback,
              best_score);
}

}  // namespace

std::string_view OutcomeName(Outcome o) {
  return o == Outcome::kMask ? "mask" : "explanation";
}

std::string_view SourceName(Source s) {
  switch (s) {
    case Source::kNone:
      return "none";
    case Source::kSingle:
      return "single";
    case Source::kCombined:
      return "combined";
    case Source::kScoreFallback:
      return "score_fallback";
  }
  return "unknown";
}

std::string_view TierName(Tier t) {
  switch (t) {
    case Tier::kBoth:
      return "both";
    case Tier::kT2tOnly:
      return "t2t_only";
    case Tier::kT2iOnly:
      return "t2i_only";
    case Tier::kFallback:
      return "fallback";
  }
  return "unknown";
}

std::string_view SelectorModeName(SelectorMode m) {
  switch (m) {
    case SelectorMode::kFull:
      return "full";
    case SelectorMode::kClipOnly:
      return "clip_only";
    case SelectorMode::kDecisionsOnly:
      return "decisions_only";
  }
  return "unknown";
}

SelectorMode ParseSelectorMode(std::string_view name) {
  if (name == "full") return SelectorMode::kFull;
  if (name == "clip_only") return SelectorMode::kClipOnly;
  if (name == "decisions_only") return SelectorMode::kDecisionsOnly;
  throw ConfigError("unknown selector mode '" + std::string(name) + "'");
}

nlohmann::json SelectionResult::ToJson() const {
  nlohmann::json j = {{"outcome", OutcomeName(outcome)},
                      {"tier", TierName(tier)},
                      {"source", SourceName(source)},
                      {"chosen_ids", chosen_ids},
                      {"score", score}};
  if (mask) j["mask"] = MaskToJson(*mask);
  if (outcome == Outcome::kExplanation) j["explanation"] = explanation;
  return j;
}

SelectionResult Select(const MaskProposalSet& proposals,
                       const std::vector<EvaluationRecord>& records,
                       const ReferenceText& ref, const CombinedScorer& scorer,
                       const SelectionOptions& options) {
  CheckRecords(proposals, records);
  if (proposals.empty()) return Explain(ref, 0.0);

  if (options.mode == SelectorMode::kClipOnly) {
    return Fallback(proposals, records, ref, options.threshold);
  }

  for (Tier tier : kTiers) {
    std::vector<size_t> group;
    for (size_t i = 0; i < records.size(); ++i) {
      if (Passes(records[i], tier)) group.push_back(i);
    }
    if (group.empty()) continue;
    const MaskProposal& first = proposals.proposals[group.front()];
    if (group.size() == 1 || options.mode == SelectorMode::kDecisionsOnly) {
      return Pick(first, Source::kSingle, tier, records[group.front()].score_sum());
    }

    size_t best = group.front();
    for (size_t i : group) {
      if (records[i].score_sum() > records[best].score_sum()) best = i;
    }
    SelectionResult result = Pick(proposals.proposals[best], Source::kSingle, tier,
                                  records[best].score_sum());
    if (!options.allow_combined) return result;

    std::vector<BinaryMask> members;
    members.reserve(group.size());
    for (size_t i : group) members.push_back(proposals.proposals[i].mask);
    BinaryMask combined = Union(members);
    const bool duplicates_member =
        std::any_of(members.begin(), members.end(),
                    [&](const BinaryMask& m) { return m == combined; });
    if (duplicates_member) return result;

    const CombinedScores cs = scorer(combined);
    const double combined_score = cs.s_t2t + cs.s_t2i;
    if (combined_score > result.score) {
      result.mask = std::move(combined);
      result.source = Source::kCombined;
      result.chosen_ids.clear();
      for (size_t i : group) result.chosen_ids.push_back(proposals.proposals[i].id);
      result.score = combined_score;
    }
    return result;
  }

  if (options.mode == SelectorMode::kDecisionsOnly) {
    double best = 0.0;
    for (const auto& r : records) best = std::max(best, r.score_sum());
    return Explain(ref, best);
  }
  return Fallback(proposals, records, ref, options.threshold);
}

}  // namespace refseg
