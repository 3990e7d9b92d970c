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

#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "refseg/errors.h"
#include "refseg/selection.h"
#include "selection_fixtures.h"

namespace refseg {
namespace {

using fixtures::ConstScorer;
using fixtures::Rec;
using fixtures::Squares;

TEST(SelectTest, HandTracedCases) {
  for (const auto& c : fixtures::HandTracedCases()) {
    SCOPED_TRACE(c.name);
    const SelectionResult got = Select(c.proposals, c.records, fixtures::HandRef(), c.scorer);
    EXPECT_EQ(got, c.expected) << got.ToJson().dump();
    EXPECT_EQ(oracle::SelectReference(c.proposals, c.records, fixtures::HandRef(), c.scorer),
              c.expected);
  }
}

TEST(SelectTest, EmptyProposalsGiveExplanation) {
  const MaskProposalSet empty = MaskProposalSet::Create("e", 4, 4, {});
  const ReferenceText ref{"nothing here", {}};
  const SelectionResult r = Select(empty, {}, ref, ConstScorer(0, 0));
  EXPECT_EQ(r.outcome, Outcome::kExplanation);
  EXPECT_EQ(r.explanation, "nothing here");
  EXPECT_FALSE(r.mask.has_value());
  EXPECT_EQ(oracle::SelectReference(empty, {}, ref, ConstScorer(0, 0)), r);
}

TEST(SelectTest, RejectsMismatchedRecords) {
  const auto set = Squares(2);
  EXPECT_THROW(Select(set, {Rec(0, true, true, 0, 0)}, fixtures::HandRef(), ConstScorer(0, 0)),
               InvalidInputError);
  EXPECT_THROW(Select(set, {Rec(1, true, true, 0, 0), Rec(0, true, true, 0, 0)},
                      fixtures::HandRef(), ConstScorer(0, 0)),
               InvalidInputError);
}

TEST(SelectTest, TieBreaksToLowestIdThenUnionLast) {
  const auto set = Squares(3);
  const std::vector<EvaluationRecord> recs = {Rec(0, false, true, .5, .5),
                                              Rec(1, true, false, .5, .5),
                                              Rec(2, true, false, .5, .5)};
  // union ties the members: member 1 keeps it
  const SelectionResult r = Select(set, recs, fixtures::HandRef(), ConstScorer(.5, .5));
  EXPECT_EQ(r.tier, Tier::kT2tOnly);
  EXPECT_EQ(r.source, Source::kSingle);
  EXPECT_EQ(r.chosen_ids, std::vector<int>{1});
}

TEST(SelectTest, UnionEqualToMemberIsNotScored) {
  const auto set = MaskProposalSet::Create(
      "nest", 10, 10,
      {BinaryMask::FromBox(10, 10, {0, 0, 5, 5}), BinaryMask::FromBox(10, 10, {1, 1, 2, 2})});
  int calls = 0;
  const SelectionResult r = Select(set, {Rec(0, true, true, .1, .1), Rec(1, true, true, .3, .3)},
                                   fixtures::HandRef(), ConstScorer(1, 1, &calls));
  EXPECT_EQ(calls, 0);
  EXPECT_EQ(r.chosen_ids, std::vector<int>{1});
  // disjoint: one scorer call per sample
  Select(Squares(3), {Rec(0, true, true, 0, 0), Rec(1, true, true, 0, 0), Rec(2, true, true, 0, 0)},
         fixtures::HandRef(), ConstScorer(1, 1, &calls));
  EXPECT_EQ(calls, 1);
}

TEST(SelectTest, OracleEquivalenceExhaustive) {
  const auto stats = fixtures::OracleSweep(100);
  EXPECT_EQ(stats.cases, 100 * (1 + 4 + 16 + 64 + 256));
  EXPECT_EQ(stats.mismatches, 0) << stats.first_mismatch;
}

// Properties over random instances.
class SelectPropertyTest : public ::testing::Test {
 protected:
  std::mt19937_64 rng{99};

  std::vector<EvaluationRecord> RandomRecords(int n) {
    std::vector<EvaluationRecord> out;
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < n; ++i) out.push_back(Rec(i, rng() & 1, rng() & 1, u(rng), u(rng)));
    return out;
  }
};

TEST_F(SelectPropertyTest, TierDominanceContainmentExplanation) {
  std::uniform_real_distribution<double> u(0, 1.5);
  for (int it = 0; it < 2000; ++it) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const auto set = Squares(n);
    const auto recs = RandomRecords(n);
    const double cs = u(rng);
    const SelectionResult r = Select(set, recs, fixtures::HandRef(), ConstScorer(cs, 0));
    bool any_both = false, any_yes = false;
    double best = 0;
    for (const auto& rec : recs) {
      any_both |= rec.d_t2t && rec.d_t2i;
      any_yes |= rec.d_t2t || rec.d_t2i;
      best = std::max(best, rec.score_sum());
    }
    if (any_both) EXPECT_EQ(r.tier, Tier::kBoth);
    EXPECT_EQ(r.outcome == Outcome::kExplanation, !any_yes && best < 1.0);
    EXPECT_EQ(r.mask.has_value(), r.outcome == Outcome::kMask);
    if (r.source == Source::kCombined) {
      ASSERT_GE(r.chosen_ids.size(), 2u);
      std::vector<BinaryMask> members;
      for (int id : r.chosen_ids) {
        EXPECT_TRUE(IsSubset(set.at(id).mask, *r.mask));
        members.push_back(set.at(id).mask);
      }
      EXPECT_EQ(Union(members), *r.mask);
    }
  }
}

TEST_F(SelectPropertyTest, RaisingWinnerKeepsWinner) {
  for (int it = 0; it < 1000; ++it) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const auto set = Squares(n);
    auto recs = RandomRecords(n);
    SelectionOptions opts;
    opts.allow_combined = false;
    const SelectionResult r = Select(set, recs, fixtures::HandRef(), ConstScorer(0, 0), opts);
    if (r.outcome != Outcome::kMask) continue;
    recs[r.chosen_ids.front()].s_t2t += 0.25;
    const SelectionResult r2 = Select(set, recs, fixtures::HandRef(), ConstScorer(0, 0), opts);
    EXPECT_EQ(r2.chosen_ids, r.chosen_ids);
    EXPECT_EQ(r2.tier, r.tier);
  }
}

TEST(SelectTest, ThresholdFlipsAtConfiguredValue) {
  const auto set = Squares(2);
  const std::vector<EvaluationRecord> recs = {Rec(0, false, false, .5, .3),
                                              Rec(1, false, false, .6, .4)};
  SelectionOptions opts;
  EXPECT_EQ(opts.threshold, 1.0);
  EXPECT_EQ(Select(set, recs, fixtures::HandRef(), ConstScorer(0, 0), opts).outcome,
            Outcome::kMask);
  opts.threshold = std::nextafter(1.0, 2.0);
  EXPECT_EQ(Select(set, recs, fixtures::HandRef(), ConstScorer(0, 0), opts).outcome,
            Outcome::kExplanation);
}

TEST(SelectTest, ClipOnlyIgnoresDecisions) {
  const auto set = Squares(3);
  const std::vector<EvaluationRecord> recs = {Rec(0, true, true, .2, .2),
                                              Rec(1, false, false, .7, .6),
                                              Rec(2, false, false, .1, .1)};
  SelectionOptions opts;
  opts.mode = SelectorMode::kClipOnly;
  const SelectionResult r = Select(set, recs, fixtures::HandRef(), ConstScorer(9, 9), opts);
  EXPECT_EQ(r.source, Source::kScoreFallback);
  EXPECT_EQ(r.chosen_ids, std::vector<int>{1});
  opts.threshold = 2.0;
  EXPECT_EQ(Select(set, recs, fixtures::HandRef(), ConstScorer(9, 9), opts).outcome,
            Outcome::kExplanation);
}

TEST(SelectTest, DecisionsOnlyIgnoresScores) {
  const auto set = Squares(3);
  SelectionOptions opts;
  opts.mode = SelectorMode::kDecisionsOnly;
  int calls = 0;
  const SelectionResult r =
      Select(set,
             {Rec(0, false, true, .9, .9), Rec(1, true, true, .1, .1), Rec(2, true, true, .9, .9)},
             fixtures::HandRef(), ConstScorer(9, 9, &calls), opts);
  EXPECT_EQ(r.chosen_ids, std::vector<int>{1});
  EXPECT_EQ(r.tier, Tier::kBoth);
  EXPECT_EQ(calls, 0);
  const SelectionResult none = Select(
      set, {Rec(0, false, false, .9, .9), Rec(1, false, false, 1, 1), Rec(2, false, false, 0, 0)},
      fixtures::HandRef(), ConstScorer(9, 9), opts);
  EXPECT_EQ(none.outcome, Outcome::kExplanation);
}

TEST(SelectTest, ModeNames) {
  for (auto m : {SelectorMode::kFull, SelectorMode::kClipOnly, SelectorMode::kDecisionsOnly}) {
    EXPECT_EQ(ParseSelectorMode(SelectorModeName(m)), m);
  }
  EXPECT_THROW(ParseSelectorMode("greedy"), ConfigError);
}

TEST(SelectTest, ResultJson) {
  const auto c = fixtures::HandTracedCases()[1];
  const nlohmann::json j = c.expected.ToJson();
  EXPECT_EQ(j["source"], "combined");
  EXPECT_EQ(j["tier"], "both");
  EXPECT_EQ(j["chosen_ids"], nlohmann::json({0, 1}));
  EXPECT_EQ(MaskFromJson(j["mask"]), *c.expected.mask);
  EXPECT_FALSE(j.contains("explanation"));
  const nlohmann::json e = fixtures::HandTracedCases()[2].expected.ToJson();
  EXPECT_EQ(e["explanation"], "the reference text");
  EXPECT_FALSE(e.contains("mask"));
}

}  // namespace
}  // namespace refseg
