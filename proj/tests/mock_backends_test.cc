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

#include "refseg/mock_backends.h"

#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "refseg/errors.h"
#include "refseg/evaluators.h"

namespace refseg {
namespace {

uint64_t Fnv(const std::string& s) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Cosine of two bags of words, bucketed exactly like the embedder.
double BagCosine(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
  std::map<uint64_t, double> va, vb;
  for (const auto& [t, n] : a) va[Fnv(t) % 256] += n;
  for (const auto& [t, n] : b) vb[Fnv(t) % 256] += n;
  double dot = 0, na = 0, nb = 0;
  for (const auto& [k, v] : va) {
    na += v * v;
    if (vb.count(k)) dot += v * vb[k];
  }
  for (const auto& [k, v] : vb) nb += v * v;
  return dot / std::sqrt(na * nb);
}

TEST(HashEmbedderTest, TextCosineMatchesBagOfWords) {
  HashEmbedder e;
  const auto a = e.EmbedText("Red, red MUG!");
  const auto b = e.EmbedText("a red mug");
  EXPECT_NEAR(CosineSimilarity(a, b),
              BagCosine({{"red", 2}, {"mug", 1}}, {{"a", 1}, {"red", 1}, {"mug", 1}}), 1e-6);
  EXPECT_EQ(a.size(), 256u);
  double norm = 0;
  for (float v : a) norm += v * v;
  EXPECT_NEAR(norm, 1.0, 1e-6);
  const auto empty = e.EmbedText("!!!");
  EXPECT_EQ(empty[0], 1.0f);
}

TEST(HashEmbedderTest, ImageUsesPaletteNamesAndSkipsBlack) {
  HashEmbedder e;
  RgbImage img(4, 1);
  img.set(0, 0, Rgb{250, 250, 250});  // white
  img.set(1, 0, Rgb{200, 40, 40});    // red
  img.set(2, 0, Rgb{210, 20, 35});    // red
  EXPECT_EQ(HashEmbedder::ColorName(Rgb{200, 40, 40}), "red");
  const auto v = e.EmbedImage(img);
  const auto t = e.EmbedText("red");
  EXPECT_NEAR(CosineSimilarity(v, t), BagCosine({{"red", 2}, {"white", 1}}, {{"red", 1}}), 1e-6);
  EXPECT_EQ(e.EmbedImage(RgbImage(3, 3))[0], 1.0f);
}

TEST(ScriptedMllmTest, RulesInOrder) {
  const RgbImage a(2, 2, Rgb{1, 2, 3});
  const nlohmann::json script = {
      {"backend_id", "s"},
      {"rules",
       {{{"prompt_contains", {"alpha"}}, {"image_hashes", {ImageHash(a)}}, {"response", "one"}},
        {{"prompt_contains", {"alpha"}}, {"responses", {"two", "three"}}}}},
      {"default", "dflt"}};
  auto m = ScriptedMllm::FromJson(script);
  EXPECT_EQ(m->id(), "s");
  const std::vector<RgbImage> with = {a};
  EXPECT_EQ(m->Complete(with, "x alpha y"), "one");
  EXPECT_EQ(m->Complete({}, "x alpha y"), "two");
  EXPECT_EQ(m->Complete({}, "alpha"), "three");
  EXPECT_EQ(m->Complete({}, "alpha"), "three");
  EXPECT_EQ(m->Complete({}, "beta"), "dflt");
  EXPECT_EQ(m->calls(), 5);
  const std::vector<RgbImage> five(5, a);
  EXPECT_THROW(m->Complete(five, "alpha"), InvalidInputError);

  auto strict = ScriptedMllm::FromJson({{"rules", nlohmann::json::array()}});
  try {
    strict->Complete({}, "q");
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_FALSE(e.retryable());
  }
}

}  // namespace
}  // namespace refseg
