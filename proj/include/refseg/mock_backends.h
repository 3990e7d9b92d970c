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

#ifndef REFSEG_MOCK_BACKENDS_H_
#define REFSEG_MOCK_BACKENDS_H_

// Deterministic offline stand-ins for the three model roles.

#include <atomic>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "refseg/backends.h"
#include "refseg/proposals.h"

namespace refseg {

// Answers from a JSON script:
//
//   {"backend_id": "...",
//    "rules": [{"prompt_contains": ["..."], "image_hashes": ["..."],
//               "response": "..."} , ...],
//    "default": "..."}
//
// The first rule whose substrings all occur in the prompt and whose image
// hashes all occur among the request images wins. A rule may give
// "responses": [...] instead, which are handed out in order (the last one
// repeats) and make the mock stateful. With no match and no default the
// call fails with a non-retryable BackendError.
class ScriptedMllm : public MllmBackend {
 public:
  struct Rule {
    std::vector<std::string> prompt_contains;
    std::vector<std::string> image_hashes;
    std::vector<std::string> responses;
  };

  ScriptedMllm(std::string backend_id, std::vector<Rule> rules,
               std::optional<std::string> default_response);
  static std::unique_ptr<ScriptedMllm> FromJson(const nlohmann::json& script);
  static std::unique_ptr<ScriptedMllm> FromFile(const std::string& path);

  const std::string& id() const override { return id_; }
  std::string Complete(std::span<const RgbImage> images,
                       const std::string& prompt) override;

  int calls() const { return calls_.load(); }

 private:
  std::string id_;
  std::vector<Rule> rules_;
  std::optional<std::string> default_;
  std::mutex mu_;
  std::vector<size_t> served_;
  std::atomic<int> calls_{0};
};

// Hashed bag-of-tokens embedder, dimension 256.
//
// Text: lower-cased ASCII, tokens are maximal [a-z0-9] runs, each counted
// into bucket Fnv1a64(token) % 256. Image: every pixel other than exact
// (0,0,0) contributes its nearest palette colour name as a token (ties go
// to the earlier palette entry). The count vector is L2-normalised; an
// empty count vector maps to the unit vector e_0.
class HashEmbedder : public Embedder {
 public:
  static constexpr int kDimension = 256;

  struct PaletteEntry {
    const char* name;
    Rgb color;
  };
  static const std::vector<PaletteEntry>& Palette();
  static std::vector<std::string> Tokenize(const std::string& text);
  static std::string ColorName(Rgb c);

  explicit HashEmbedder(std::string backend_id = "mock-embedder")
      : id_(std::move(backend_id)) {}

  const std::string& id() const override { return id_; }
  int dimension() const override { return kDimension; }
  std::vector<float> EmbedText(const std::string& text) override;
  std::vector<float> EmbedImage(const RgbImage& image) override;

  int calls() const { return calls_.load(); }

 private:
  static std::vector<float> Normalize(const std::vector<double>& counts);
  std::string id_;
  std::atomic<int> calls_{0};
};

// Returns the masks of a proposal fixture. Fixtures are matched by their
// "image_hash"; a lone fixture without a hash matches every image.
class FixtureSegmenter : public Segmenter {
 public:
  // `path` is a fixture file or a directory of *.json fixtures.
  explicit FixtureSegmenter(const std::string& path,
                            std::string backend_id = "mock-segmenter");
  explicit FixtureSegmenter(std::vector<ProposalFixture> fixtures,
                            std::string backend_id = "mock-segmenter");

  const std::string& id() const override { return id_; }
  std::vector<BinaryMask> Segment(const RgbImage& image,
                                  std::span<const Point> points) override;

  int calls() const { return calls_.load(); }

 private:
  std::string id_;
  std::vector<ProposalFixture> fixtures_;
  std::atomic<int> calls_{0};
};

}  // namespace refseg

#endif  // REFSEG_MOCK_BACKENDS_H_
