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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "refseg/hashing.h"

namespace refseg {
namespace fs = std::filesystem;

ScriptedMllm::ScriptedMllm(std::string backend_id, std::vector<Rule> rules,
                           std::optional<std::string> default_response)
    : id_(std::move(backend_id)),
      rules_(std::move(rules)),
      default_(std::move(default_response)),
      served_(rules_.size(), 0) {}

std::unique_ptr<ScriptedMllm> ScriptedMllm::FromJson(const nlohmann::json& script) {
  try {
    std::vector<Rule> rules;
    for (const auto& r : script.value("rules", nlohmann::json::array())) {
      Rule rule;
      rule.prompt_contains =
          r.value("prompt_contains", std::vector<std::string>{});
      rule.image_hashes = r.value("image_hashes", std::vector<std::string>{});
      if (r.contains("responses")) {
        rule.responses = r.at("responses").get<std::vector<std::string>>();
      } else {
        rule.responses.push_back(r.at("response").get<std::string>());
      }
      if (rule.responses.empty()) throw ParseError("script rule without responses");
      rules.push_back(std::move(rule));
    }
    std::optional<std::string> def;
    if (script.contains("default")) def = script.at("default").get<std::string>();
    return std::make_unique<ScriptedMllm>(script.value("backend_id", "mock-mllm"),
                                          std::move(rules), std::move(def));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad mock script: ") + e.what());
  }
}

std::unique_ptr<ScriptedMllm> ScriptedMllm::FromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read mock script " + path);
  try {
    return FromJson(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string ScriptedMllm::Complete(std::span<const RgbImage> images,
                                   const std::string& prompt) {
  ++calls_;
  if (images.size() > static_cast<size_t>(kMaxImagesPerRequest)) {
    throw InvalidInputError("too many images in one completion request");
  }
  std::vector<std::string> hashes;
  hashes.reserve(images.size());
  for (const auto& img : images) hashes.push_back(ImageHash(img));

  for (size_t i = 0; i < rules_.size(); ++i) {
    const Rule& rule = rules_[i];
    const bool text_ok = std::all_of(
        rule.prompt_contains.begin(), rule.prompt_contains.end(),
        [&](const std::string& s) { return prompt.find(s) != std::string::npos; });
    const bool images_ok = std::all_of(
        rule.image_hashes.begin(), rule.image_hashes.end(), [&](const std::string& h) {
          return std::find(hashes.begin(), hashes.end(), h) != hashes.end();
        });
    if (!text_ok || !images_ok) continue;
    if (rule.responses.size() == 1) return rule.responses.front();
    std::lock_guard<std::mutex> lock(mu_);
    const size_t k = std::min(served_[i]++, rule.responses.size() - 1);
    return rule.responses[k];
  }
  if (default_) return *default_;
  throw BackendError("scripted mock has no response for this request",
                     /*retryable=*/false);
}

const std::vector<HashEmbedder::PaletteEntry>& HashEmbedder::Palette() {
  static const std::vector<PaletteEntry> kPalette = {
      {"black", {0, 0, 0}},        {"white", {255, 255, 255}},
      {"gray", {128, 128, 128}},   {"red", {220, 30, 30}},
      {"green", {30, 160, 60}},    {"blue", {30, 60, 200}},
      {"yellow", {240, 220, 40}},  {"orange", {240, 140, 30}},
      {"brown", {120, 70, 30}},    {"purple", {130, 50, 160}},
      {"pink", {240, 150, 190}},
  };
  return kPalette;
}

std::vector<std::string> HashEmbedder::Tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) && c < 128) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::string HashEmbedder::ColorName(Rgb c) {
  const auto& palette = Palette();
  size_t best = 0;
  int64_t best_d = std::numeric_limits<int64_t>::max();
  for (size_t i = 0; i < palette.size(); ++i) {
    const int64_t dr = int64_t{c.r} - palette[i].color.r;
    const int64_t dg = int64_t{c.g} - palette[i].color.g;
    const int64_t db = int64_t{c.b} - palette[i].color.b;
    const int64_t d = dr * dr + dg * dg + db * db;
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return palette[best].name;
}

std::vector<float> HashEmbedder::Normalize(const std::vector<double>& counts) {
  double norm = 0.0;
  for (double v : counts) norm += v * v;
  std::vector<float> out(kDimension, 0.0f);
  if (norm == 0.0) {
    out[0] = 1.0f;
    return out;
  }
  norm = std::sqrt(norm);
  for (int i = 0; i < kDimension; ++i) {
    out[i] = static_cast<float>(counts[i] / norm);
  }
  return out;
}

std::vector<float> HashEmbedder::EmbedText(const std::string& text) {
  ++calls_;
  std::vector<double> counts(kDimension, 0.0);
  for (const auto& tok : Tokenize(text)) counts[Fnv1a64(tok) % kDimension] += 1.0;
  return Normalize(counts);
}

std::vector<float> HashEmbedder::EmbedImage(const RgbImage& image) {
  ++calls_;
  std::map<std::string, int64_t> per_name;
  const auto& px = image.pixels();
  for (size_t i = 0; i < px.size(); i += 3) {
    const Rgb c{px[i], px[i + 1], px[i + 2]};
    if (c == kBlack) continue;
    ++per_name[ColorName(c)];
  }
  std::vector<double> counts(kDimension, 0.0);
  for (const auto& [name, n] : per_name) {
    counts[Fnv1a64(name) % kDimension] += static_cast<double>(n);
  }
  return Normalize(counts);
}

FixtureSegmenter::FixtureSegmenter(const std::string& path, std::string backend_id)
    : id_(std::move(backend_id)) {
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) fixtures_.push_back(ReadFixture(f.string()));
  } else {
    fixtures_.push_back(ReadFixture(path));
  }
}

FixtureSegmenter::FixtureSegmenter(std::vector<ProposalFixture> fixtures,
                                   std::string backend_id)
    : id_(std::move(backend_id)), fixtures_(std::move(fixtures)) {}

std::vector<BinaryMask> FixtureSegmenter::Segment(const RgbImage& image,
                                                  std::span<const Point> points) {
  ++calls_;
  if (points.empty()) throw InvalidInputError("segment called with no points");
  const std::string hash = ImageHash(image);
  const ProposalFixture* match = nullptr;
  for (const auto& f : fixtures_) {
    if (f.image_hash == hash) {
      match = &f;
      break;
    }
  }
  if (match == nullptr && fixtures_.size() == 1 && fixtures_[0].image_hash.empty()) {
    match = &fixtures_[0];
  }
  if (match == nullptr) {
    throw BackendError("no proposal fixture for image " + hash, false);
  }
  for (const auto& m : match->masks) {
    if (m.width() != image.width() || m.height() != image.height()) {
      throw DimensionError("fixture mask does not match the image grid");
    }
  }
  return match->masks;
}

}  // namespace refseg
