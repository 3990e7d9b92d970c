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

#include "refseg/proposals.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "refseg/errors.h"

namespace refseg {

void SegmenterConfig::Validate() const {
  auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!open_unit(point_fraction)) throw ConfigError("point_fraction must lie in (0,1)");
  if (!open_unit(min_area_fraction)) throw ConfigError("min_area_fraction must lie in (0,1)");
  if (!(dup_iou > 0.0 && dup_iou <= 1.0)) throw ConfigError("dup_iou must lie in (0,1]");
}

nlohmann::json SegmenterConfig::ToJson() const {
  return {{"point_fraction", point_fraction},
          {"min_area_fraction", min_area_fraction},
          {"dup_iou", dup_iou}};
}

SegmenterConfig SegmenterConfig::FromJson(const nlohmann::json& j) {
  SegmenterConfig c;
  c.point_fraction = j.value("point_fraction", c.point_fraction);
  c.min_area_fraction = j.value("min_area_fraction", c.min_area_fraction);
  c.dup_iou = j.value("dup_iou", c.dup_iou);
  return c;
}

std::vector<Point> ComputePointGrid(int width, int height,
                                    double point_fraction) {
  if (width < 1 || height < 1) throw InvalidInputError("grid needs a >= 1x1 image");
  const double n = point_fraction * static_cast<double>(width) * height;
  const int64_t side = std::max<int64_t>(1, std::llround(std::sqrt(n)));
  std::vector<Point> points;
  points.reserve(static_cast<size_t>(side * side));
  for (int64_t j = 0; j < side; ++j) {
    for (int64_t i = 0; i < side; ++i) {
      points.push_back({static_cast<int>((2 * i + 1) * width / (2 * side)),
                        static_cast<int>((2 * j + 1) * height / (2 * side))});
    }
  }
  return points;
}

MaskProposalSet PostprocessProposals(const std::string& image_id, int width,
                                     int height, std::vector<BinaryMask> raw,
                                     const SegmenterConfig& cfg) {
  std::erase_if(raw, [](const BinaryMask& m) { return m.empty(); });
  MaskProposalSet set =
      MaskProposalSet::Create(image_id, width, height, std::move(raw));
  return Dedup(FilterSmall(set, cfg.min_area_fraction), cfg.dup_iou);
}

MaskProposalSet GenerateProposals(const std::string& image_id,
                                  const RgbImage& image, Segmenter& backend,
                                  const SegmenterConfig& cfg) {
  cfg.Validate();
  const auto points =
      ComputePointGrid(image.width(), image.height(), cfg.point_fraction);
  std::vector<BinaryMask> raw = backend.Segment(image, points);
  return PostprocessProposals(image_id, image.width(), image.height(),
                              std::move(raw), cfg);
}

ProposalFixture ParseFixture(const nlohmann::json& j) {
  ProposalFixture f;
  try {
    f.image_id = j.at("image_id").get<std::string>();
    f.width = j.at("width").get<int>();
    f.height = j.at("height").get<int>();
    f.image_hash = j.value("image_hash", "");
    const auto& masks = j.at("masks");
    if (!masks.is_array()) throw ParseError("fixture 'masks' must be an array");
    for (size_t i = 0; i < masks.size(); ++i) {
      BinaryMask m = MaskFromJson(masks[i]);
      if (m.width() != f.width || m.height() != f.height) {
        std::ostringstream os;
        os << "fixture " << f.image_id << " mask " << i << " is " << m.width()
           << "x" << m.height() << ", expected " << f.width << "x" << f.height;
        throw DimensionError(os.str());
      }
      f.masks.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad proposal fixture: ") + e.what());
  }
  return f;
}

ProposalFixture ReadFixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot read fixture " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return ParseFixture(j);
}

nlohmann::json FixtureToJson(const ProposalFixture& fixture) {
  nlohmann::json masks = nlohmann::json::array();
  for (const auto& m : fixture.masks) masks.push_back(MaskToJson(m));
  nlohmann::json j = {{"image_id", fixture.image_id},
                      {"width", fixture.width},
                      {"height", fixture.height},
                      {"masks", masks}};
  if (!fixture.image_hash.empty()) j["image_hash"] = fixture.image_hash;
  return j;
}

void SaveProposals(const MaskProposalSet& set, const std::string& path,
                   const std::string& image_hash) {
  ProposalFixture f{set.image_id, set.width, set.height, image_hash, set.masks()};
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write " + path);
  out << FixtureToJson(f).dump() << "\n";
}

MaskProposalSet LoadFixtureProposals(const std::string& path,
                                     const SegmenterConfig& cfg) {
  ProposalFixture f = ReadFixture(path);
  return PostprocessProposals(f.image_id, f.width, f.height, std::move(f.masks),
                              cfg);
}

}  // namespace refseg
