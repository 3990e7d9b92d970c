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

#include "refseg/synthetic.h"

#include <filesystem>
#include <fstream>
#include <optional>

#include <nlohmann/json.hpp>

#include "refseg/dataset.h"
#include "refseg/errors.h"
#include "refseg/image.h"
#include "refseg/mask.h"
#include "refseg/proposals.h"
#include "refseg/visual_prompts.h"

namespace refseg::synthetic {
namespace fs = std::filesystem;

namespace {

constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kGray{128, 128, 128};
constexpr Rgb kRedP{220, 30, 30};
constexpr Rgb kGreenP{30, 160, 60};
constexpr Rgb kBlue{30, 60, 200};
constexpr Rgb kYellow{240, 220, 40};
constexpr Rgb kBrown{120, 70, 30};
constexpr Rgb kPurple{130, 50, 160};

struct Rect {
  int x0, y0, x1, y1;  // inclusive
};

struct Proposal {
  std::vector<Rect> rects;
  std::string text;  // candidate text
  bool t2t = false;
  bool t2i = false;
};

struct Scene {
  std::string id;
  std::string expression;
  std::string reference;
  std::vector<std::pair<Rect, Rgb>> paint = {};
  std::vector<Proposal> proposals = {};
  std::vector<Rect> gt = {};  // empty: no target
  // Extra raw masks the post-processing must drop (tiny or duplicates).
  std::vector<std::vector<Rect>> noise = {};
  // Candidate text for the union of these proposal indices.
  std::vector<int> union_of = {};
  std::string union_text = {};
};

BinaryMask MaskOf(const std::vector<Rect>& rects) {
  std::vector<uint8_t> dense(kSize * kSize, 0);
  for (const Rect& r : rects) {
    for (int y = r.y0; y <= r.y1; ++y) {
      for (int x = r.x0; x <= r.x1; ++x) dense[y * kSize + x] = 1;
    }
  }
  return BinaryMask::FromDense(kSize, kSize, dense);
}

std::vector<Scene> Scenes() {
  std::vector<Scene> s;

  Scene chair{"chair", "mesh backrest",
              "A gray mesh backrest at the upper part of the chair above the red seat"};
  const Rect back{30, 10, 69, 39}, seat{25, 40, 74, 54};
  const Rect leg_l{28, 55, 31, 89}, leg_r{68, 55, 71, 89};
  chair.paint = {{back, kGray}, {seat, kRedP}, {leg_l, kBrown}, {leg_r, kBrown}};
  chair.proposals = {
      {{back}, "A gray mesh backrest at the top of the chair", true, true},
      {{seat}, "A red cushioned seat in the middle of the chair", false, false},
      {{leg_l, leg_r}, "Two thin brown legs under the seat", false, false}};
  chair.gt = {back};
  chair.noise = {{{2, 2, 6, 2}}, {{30, 10, 69, 38}}};
  s.push_back(chair);

  Scene sofa{"sofa", "all legs of the sofa",
             "Four short brown legs at the bottom of the purple sofa"};
  const Rect body{15, 30, 84, 64};
  const Rect legs[4] = {{18, 65, 21, 70}, {38, 65, 41, 70}, {58, 65, 61, 70}, {78, 65, 81, 70}};
  sofa.paint = {{body, kPurple}};
  for (const Rect& l : legs) sofa.paint.push_back({l, kBrown});
  sofa.proposals = {{{body}, "A wide purple sofa with a cushioned seat", false, false}};
  const char* where[4] = {"far left", "left of center", "right of center", "far right"};
  for (int i = 0; i < 4; ++i) {
    sofa.proposals.push_back({{legs[i]},
                              std::string("A short brown leg at the ") + where[i] +
                                  " bottom of the sofa",
                              true, true});
    sofa.gt.push_back(legs[i]);
  }
  sofa.union_of = {1, 2, 3, 4};
  sofa.union_text = sofa.reference;
  s.push_back(sofa);

  Scene room{"room", "the cat sleeping on the sofa",
             "There is no cat in this image, it only shows a lamp standing on a table"};
  const Rect lamp{40, 20, 59, 79}, table{20, 80, 79, 94};
  room.paint = {{lamp, kGreenP}, {table, kBrown}};
  room.proposals = {{{lamp}, "Tall shade fixture with round top", false, false},
                    {{table}, "Wooden surface spanning the bottom", false, false}};
  s.push_back(room);

  Scene lamps{"lamps", "the lamp that is switched on",
              "A yellow lamp on the left side that is switched on and glowing"};
  const Rect on{15, 20, 34, 79}, off{65, 20, 84, 79};
  lamps.paint = {{on, kYellow}, {off, kYellow}};
  lamps.proposals = {
      {{on}, "The lit lamp at left emitting warm light", true, true},
      {{off}, "A yellow lamp on the right side that is switched off and not glowing",
       false, false}};
  lamps.gt = {on};
  s.push_back(lamps);

  Scene mugs{"mugs", "the red mug", "A red mug with a handle on the left side of the table"};
  const Rect mug{20, 40, 39, 69}, handle{40, 48, 44, 59}, blue{60, 40, 79, 69};
  mugs.paint = {{mug, kRedP}, {handle, kRedP}, {blue, kBlue}};
  mugs.proposals = {{{mug}, "A red mug body on the left", true, false},
                    {{handle}, "A small curved handle", false, false},
                    {{blue}, "A blue mug on the right", false, false}};
  mugs.gt = {mug, handle};
  s.push_back(mugs);
  return s;
}

const std::vector<PromptKind>& AllKinds() {
  static const std::vector<PromptKind> k = {PromptKind::kOriginal, PromptKind::kMaskCropped,
                                            PromptKind::kBbox, PromptKind::kContour,
                                            PromptKind::kBlur};
  return k;
}

nlohmann::json Rule(std::vector<std::string> contains, std::vector<std::string> hashes,
                    const std::string& response) {
  nlohmann::json r = {{"prompt_contains", contains}, {"response", response}};
  if (!hashes.empty()) r["image_hashes"] = hashes;
  return r;
}

void WriteText(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << text;
}

}  // namespace

std::vector<std::string> SampleIds() {
  std::vector<std::string> ids;
  for (const auto& s : Scenes()) ids.push_back(s.id);
  return ids;
}

void WriteFixtures(const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root / kImagesDir);
  fs::create_directories(root / kFixturesDir);

  nlohmann::json rules = nlohmann::json::array();
  std::vector<Sample> samples;
  for (const Scene& sc : Scenes()) {
    RgbImage image(kSize, kSize, kWhite);
    for (const auto& [r, c] : sc.paint) {
      for (int y = r.y0; y <= r.y1; ++y) {
        for (int x = r.x0; x <= r.x1; ++x) image.set(x, y, c);
      }
    }
    const std::string image_rel = std::string(kImagesDir) + "/" + sc.id + ".png";
    WritePng(image, (root / image_rel).string());

    ProposalFixture fixture{sc.id, kSize, kSize, ImageHash(image), {}};
    for (const auto& p : sc.proposals) fixture.masks.push_back(MaskOf(p.rects));
    for (const auto& n : sc.noise) fixture.masks.push_back(MaskOf(n));
    WriteText(root / kFixturesDir / (sc.id + ".json"), FixtureToJson(fixture).dump() + "\n");

    rules.push_back(Rule({"For the region described as {" + sc.expression + "}"}, {},
                         sc.reference));
    auto per_kind = [&](const BinaryMask& m, auto&& emit) {
      for (PromptKind k : AllKinds()) emit(ImageHash(RenderKind(image, m, k)));
    };
    for (const auto& p : sc.proposals) {
      const BinaryMask m = MaskOf(p.rects);
      per_kind(m, [&](const std::string& h) {
        rules.push_back(Rule({"Generate a single detailed sentence"}, {h}, p.text));
      });
      rules.push_back(Rule({"region:  " + sc.expression + ". ",
                            "candidate text to evaluate: " + p.text + ". "},
                           {}, p.t2t ? "yes" : "no"));
      per_kind(m, [&](const std::string& h) {
        rules.push_back(Rule({"cropped mask image: " + sc.reference + ". The target is " +
                              sc.expression + " for context"},
                             {h}, p.t2i ? "yes" : "no"));
      });
    }
    if (!sc.union_of.empty()) {
      std::vector<BinaryMask> parts;
      for (int i : sc.union_of) parts.push_back(MaskOf(sc.proposals[i].rects));
      per_kind(Union(parts), [&](const std::string& h) {
        rules.push_back(Rule({"Generate a single detailed sentence"}, {h}, sc.union_text));
      });
    }
    std::optional<BinaryMask> gt;
    if (!sc.gt.empty()) gt = MaskOf(sc.gt);
    samples.push_back(Sample{sc.id, sc.id, (root / image_rel).string(),
                             Expression(sc.expression), gt});
  }
  const nlohmann::json script = {{"backend_id", "mock-mllm"}, {"rules", rules},
                                 {"default", "no"}};
  WriteText(root / kScriptFile, script.dump(1) + "\n");

  const nlohmann::json config = {
      {"backends",
       {{{"role", "mllm"}, {"backend_id", "mock-mllm"},
         {"endpoint", std::string("mock:") + kScriptFile}},
        {{"role", "embedder"}, {"backend_id", "mock-embedder"}, {"endpoint", "mock:"}},
        {{"role", "segmenter"}, {"backend_id", "mock-segmenter"},
         {"endpoint", std::string("mock:") + kFixturesDir}}}},
      {"dataset", {{"format", "ares_json"}, {"path", kDatasetFile}}},
      {"fixtures", kFixturesDir}};
  WriteText(root / kConfigFile, config.dump(2) + "\n");
  SaveAresJson(samples, (root / kDatasetFile).string());
}

}  // namespace refseg::synthetic
