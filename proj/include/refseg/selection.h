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

#ifndef REFSEG_SELECTION_H_
#define REFSEG_SELECTION_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "refseg/attribute_prompting.h"
#include "refseg/evaluators.h"
#include "refseg/mask.h"

namespace refseg {

enum class Outcome { kMask, kExplanation };
enum class Source { kNone, kSingle, kCombined, kScoreFallback };
enum class Tier { kBoth, kT2tOnly, kT2iOnly, kFallback };

std::string_view OutcomeName(Outcome o);
std::string_view SourceName(Source s);
std::string_view TierName(Tier t);

struct SelectionResult {
  Outcome outcome = Outcome::kExplanation;
  std::optional<BinaryMask> mask;  // present iff outcome == kMask
  Source source = Source::kNone;
  std::vector<int> chosen_ids;     // proposals whose pixels form `mask`
  std::string explanation;         // reference text iff kExplanation
  Tier tier = Tier::kFallback;
  double score = 0.0;              // winning (or best rejected) s_t2t + s_t2i

  nlohmann::json ToJson() const;
  bool operator==(const SelectionResult&) const = default;
};

struct CombinedScores {
  double s_t2t = 0.0;
  double s_t2i = 0.0;
};

// Scores a union mask, typically by generating and embedding a fresh
// candidate text for it.
using CombinedScorer = std::function<CombinedScores(const BinaryMask&)>;

enum class SelectorMode {
  kFull,           // decision tiers, union candidate, score fallback
  kClipOnly,       // embedding scores only: the fallback step alone
  kDecisionsOnly,  // decision tiers only; lowest id wins, no fallback
};

std::string_view SelectorModeName(SelectorMode m);
SelectorMode ParseSelectorMode(std::string_view name);

struct SelectionOptions {
  // Best score sum below this returns the explanation.
  double threshold = 1.0;
  SelectorMode mode = SelectorMode::kFull;
  // When false the union candidate is never built.
  bool allow_combined = true;
};

// Hierarchical grouping and selection.
//
// Tiers are tried in order (t2t and t2i yes), (t2t yes), (t2i yes). The
// first tier with a single passing proposal returns it. With several, the
// union of their masks joins the pool (unless it equals one of the members)
// and the pool's best s_t2t + s_t2i wins. If no tier passes, the best
// proposal is returned when its score sum reaches `threshold`, otherwise
// the reference text. Ties go to the lowest proposal id, the union last.
//
// Requires one record per proposal in id order; throws InvalidInputError
// otherwise. An empty proposal set yields the explanation.
SelectionResult Select(const MaskProposalSet& proposals,
                       const std::vector<EvaluationRecord>& records,
                       const ReferenceText& ref, const CombinedScorer& scorer,
                       const SelectionOptions& options = {});

}  // namespace refseg

#endif  // REFSEG_SELECTION_H_
