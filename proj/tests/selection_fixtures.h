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

#ifndef REFSEG_TESTS_SELECTION_FIXTURES_H_
#define REFSEG_TESTS_SELECTION_FIXTURES_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "oracles.h"
#include "refseg/hashing.h"
#include "refseg/mask.h"
#include "refseg/selection.h"

namespace refseg::fixtures {

inline EvaluationRecord Rec(int id, bool t2t, bool t2i, double s_t2t, double s_t2i) {
  EvaluationRecord r;
  r.proposal_id = id;
  r.d_t2t = t2t;
  r.d_t2i = t2i;
  r.s_t2t = s_t2t;
  r.s_t2i = s_t2i;
  return r;
}

// n disjoint 2x2 squares along the diagonal of a 10x10 grid.
inline MaskProposalSet Squares(int n) {
  std::vector<BinaryMask> masks;
  for (int i = 0; i < n; ++i) {
    masks.push_back(BinaryMask::FromBox(10, 10, {2 * i, 2 * i, 2 * i + 1, 2 * i + 1}));
  }
  return MaskProposalSet::Create("squares", 10, 10, std::move(masks));
}

inline CombinedScorer ConstScorer(double s_t2t, double s_t2i, int* calls = nullptr) {
  return [=](const BinaryMask&) {
    if (calls != nullptr) ++*calls;
    return CombinedScores{s_t2t, s_t2i};
  };
}

struct HandCase {
  std::string name;
  MaskProposalSet proposals;
  std::vector<EvaluationRecord> records;
  CombinedScorer scorer;
  SelectionResult expected;
};

inline const ReferenceText& HandRef() {
  static const ReferenceText ref{"the reference text", {}};
  return ref;
}

inline std::vector<HandCase> HandTracedCases() {
  std::vector<HandCase> cases;
  {
    HandCase c{"single_tier_win", Squares(3),
               {Rec(0, true, true, .8, .2), Rec(1, false, true, .9, .3),
                Rec(2, true, false, .9, .3)},
               ConstScorer(0, 0), {}};
    c.expected.outcome = Outcome::kMask;
    c.expected.mask = c.proposals.at(0).mask;
    c.expected.source = Source::kSingle;
    c.expected.tier = Tier::kBoth;
    c.expected.chosen_ids = {0};
    c.expected.score = .8 + .2;
    cases.push_back(std::move(c));
  }
  {
    HandCase c{"union_win", Squares(2),
               {Rec(0, true, true, .8, .2), Rec(1, true, true, .7, .2)},
               ConstScorer(.9, .3), {}};
    const std::vector<BinaryMask> both = c.proposals.masks();
    c.expected.outcome = Outcome::kMask;
    c.expected.mask = Union(both);
    c.expected.source = Source::kCombined;
    c.expected.tier = Tier::kBoth;
    c.expected.chosen_ids = {0, 1};
    c.expected.score = .9 + .3;
    cases.push_back(std::move(c));
  }
  {
    HandCase c{"explanation_fallback", Squares(2),
               {Rec(0, false, false, .3, .2), Rec(1, false, false, .4, .25)},
               ConstScorer(0, 0), {}};
    c.expected.outcome = Outcome::kExplanation;
    c.expected.source = Source::kNone;
    c.expected.tier = Tier::kFallback;
    c.expected.explanation = HandRef().text;
    c.expected.score = .4 + .25;
    cases.push_back(std::move(c));
  }
  {
    HandCase c{"score_fallback", Squares(1), {Rec(0, false, false, .8, .3)},
               ConstScorer(0, 0), {}};
    c.expected.outcome = Outcome::kMask;
    c.expected.mask = c.proposals.at(0).mask;
    c.expected.source = Source::kScoreFallback;
    c.expected.tier = Tier::kFallback;
    c.expected.chosen_ids = {0};
    c.expected.score = .8 + .3;
    cases.push_back(std::move(c));
  }
  return cases;
}

struct SweepStats {
  int64_t cases = 0;
  int64_t mismatches = 0;
  std::string first_mismatch;
};

// Every (d_t2t, d_t2i) pattern for N in 0..4 proposals, `draws` random score
// draws per pattern. Scores come from a coarse grid so ties happen often;
// masks are random and sometimes nested so unions can equal a member.
inline SweepStats OracleSweep(int draws, uint64_t seed = 7) {
  SweepStats stats;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> step(0, 10);
  std::bernoulli_distribution coin(0.5);
  const ReferenceText ref{"ref", {}};
  for (int n = 0; n <= 4; ++n) {
    int patterns = 1;
    for (int i = 0; i < n; ++i) patterns *= 4;
    for (int pat = 0; pat < patterns; ++pat) {
      for (int d = 0; d < draws; ++d) {
        std::vector<BinaryMask> masks;
        while (static_cast<int>(masks.size()) < n) {
          BinaryMask m;
          if (!masks.empty() && coin(rng)) {
            // superset of an earlier mask: its union with that one is itself
            oracle::Dense dense = oracle::FromMask(masks.back());
            dense.at(static_cast<int>(rng() % 8), static_cast<int>(rng() % 8)) = 1;
            m = oracle::ToMask(dense);
          } else {
            m = oracle::ToMask(oracle::RandomDense(rng, 8, 8));
          }
          if (!m.empty()) masks.push_back(std::move(m));
        }
        const MaskProposalSet set = MaskProposalSet::Create("sweep", 8, 8, masks);
        std::vector<EvaluationRecord> records;
        for (int i = 0; i < n; ++i) {
          const int bits = (pat >> (2 * i)) & 3;
          records.push_back(Rec(i, bits & 1, bits & 2, step(rng) / 10.0, step(rng) / 10.0));
        }
        const uint64_t salt = rng();
        const CombinedScorer scorer = [salt](const BinaryMask& m) {
          const nlohmann::json j = MaskToJson(m);
          const uint64_t h = Fnv1a64(j.dump()) ^ salt;
          return CombinedScores{static_cast<double>(h % 11) / 10.0,
                                static_cast<double>((h >> 8) % 11) / 10.0};
        };
        SelectionOptions opts;
        opts.allow_combined = d % 5 != 4;
        ++stats.cases;
        const SelectionResult got = Select(set, records, ref, scorer, opts);
        const SelectionResult want = oracle::SelectReference(set, records, ref, scorer, opts);
        if (!(got == want)) {
          if (stats.mismatches == 0) {
            stats.first_mismatch = "n=" + std::to_string(n) + " pattern=" +
                                   std::to_string(pat) + " got " + got.ToJson().dump() +
                                   " want " + want.ToJson().dump();
          }
          ++stats.mismatches;
        }
      }
    }
  }
  return stats;
}

}  // namespace refseg::fixtures

#endif  // REFSEG_TESTS_SELECTION_FIXTURES_H_
