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

#ifndef REFSEG_PROPOSALS_H_
#define REFSEG_PROPOSALS_H_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "refseg/backends.h"
#include "refseg/image.h"
#include "refseg/mask.h"

namespace refseg {

struct SegmenterConfig {
  // Sample points as a fraction of all image pixels (0.015%).
  double point_fraction = 0.00015;
  // Proposals below this fraction of the image area are dropped (0.1%).
  double min_area_fraction = 0.001;
  // IoU at or above which two proposals count as duplicates.
  double dup_iou = 0.95;

  // Throws ConfigError unless every field lies in (0, 1), dup_iou in (0, 1].
  void Validate() const;
  nlohmann::json ToJson() const;
  static SegmenterConfig FromJson(const nlohmann::json& j);
};

// Square grid of s x s points, s = max(1, round(sqrt(fraction * W * H))),
// one per equal cell at the (floored) cell centre, row-major.
std::vector<Point> ComputePointGrid(int width, int height,
                                    double point_fraction);

// Raw segmenter output -> drop empty masks -> FilterSmall -> Dedup. The
// result is ordered by descending area with dense ids.
MaskProposalSet PostprocessProposals(const std::string& image_id, int width,
                                     int height, std::vector<BinaryMask> raw,
                                     const SegmenterConfig& cfg);

// Runs the segmenter on the configured point grid then post-processes.
// Zero returned masks is a valid (empty) result.
MaskProposalSet GenerateProposals(const std::string& image_id,
                                  const RgbImage& image, Segmenter& backend,
                                  const SegmenterConfig& cfg);

// On-disk proposal fixture:
//   {"image_id", "width", "height", "image_hash"?, "masks": [mask...]}
struct ProposalFixture {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::string image_hash;  // optional; keys the fixture segmenter
  std::vector<BinaryMask> masks;
};

ProposalFixture ParseFixture(const nlohmann::json& j);
ProposalFixture ReadFixture(const std::string& path);
nlohmann::json FixtureToJson(const ProposalFixture& fixture);

void SaveProposals(const MaskProposalSet& set, const std::string& path,
                   const std::string& image_hash = "");
// Reads a fixture and passes it through PostprocessProposals.
MaskProposalSet LoadFixtureProposals(const std::string& path,
                                     const SegmenterConfig& cfg = {});

}  // namespace refseg

#endif  // REFSEG_PROPOSALS_H_
