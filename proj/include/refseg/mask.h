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

#ifndef REFSEG_MASK_H_
#define REFSEG_MASK_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace refseg {

// A maximal stretch of set pixels in row-major flat-index order.
struct Run {
  int64_t start = 0;
  int64_t length = 0;
  bool operator==(const Run&) const = default;
};

// Inclusive pixel coordinates.
struct BoundingBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;
  int width() const { return x_max - x_min + 1; }
  int height() const { return y_max - y_min + 1; }
  bool operator==(const BoundingBox&) const = default;
};

// Run-length encoded binary mask over a fixed width x height grid.
//
// Runs are always kept canonical: sorted, non-overlapping, non-adjacent and
// non-empty, so two masks with the same pixels compare equal.
class BinaryMask {
 public:
  BinaryMask() = default;
  // Empty mask on a width x height grid.
  BinaryMask(int width, int height);

  // Runs may arrive unsorted, overlapping or adjacent; they are merged.
  // Zero-length runs are dropped. Runs outside the grid are rejected.
  static BinaryMask FromRuns(int width, int height, std::vector<Run> runs);
  // Alternating 0-run/1-run lengths starting with the 0-run. The counts may
  // cover fewer than width*height pixels; the remainder is background.
  static BinaryMask FromCounts(int width, int height,
                               std::span<const int64_t> counts);
  // Any non-zero byte is a set pixel.
  static BinaryMask FromDense(int width, int height,
                              std::span<const uint8_t> pixels);
  static BinaryMask Full(int width, int height);
  static BinaryMask FromBox(int width, int height, const BoundingBox& box);

  int width() const { return width_; }
  int height() const { return height_; }
  int64_t pixel_count() const {
    return static_cast<int64_t>(width_) * height_;
  }
  const std::vector<Run>& runs() const { return runs_; }
  bool empty() const { return runs_.empty(); }
  bool SameGrid(const BinaryMask& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool Contains(int x, int y) const;
  std::vector<uint8_t> ToDense() const;
  // Canonical counts: leading 0-run (possibly 0), then alternating lengths,
  // ending with the trailing 0-run when the last run stops short of the end.
  // The counts always sum to width*height.
  std::vector<int64_t> ToCounts() const;

  bool operator==(const BinaryMask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Run> runs_;
};

int64_t Area(const BinaryMask& mask);
// Throws DimensionError on grid mismatch.
int64_t IntersectionArea(const BinaryMask& a, const BinaryMask& b);
// |a n b| / |a u b|; 1.0 when both are empty.
double Iou(const BinaryMask& a, const BinaryMask& b);
// Pixel-wise OR. Throws InvalidInputError on an empty list.
BinaryMask Union(std::span<const BinaryMask> masks);
bool IsSubset(const BinaryMask& inner, const BinaryMask& outer);
// Tight box. Throws InvalidInputError for an empty mask.
BoundingBox GetBoundingBox(const BinaryMask& mask);

// {"width", "height", "counts"} with row-major counts.
nlohmann::json MaskToJson(const BinaryMask& mask);
BinaryMask MaskFromJson(const nlohmann::json& j);
void SaveMask(const BinaryMask& mask, const std::string& path);
BinaryMask LoadMask(const std::string& path);

struct MaskProposal {
  int id = 0;
  BinaryMask mask;
  int64_t area = 0;
  BoundingBox bbox;

  // Throws InvalidInputError on an empty mask.
  static MaskProposal Make(int id, BinaryMask mask);
  bool operator==(const MaskProposal&) const = default;
};

struct MaskProposalSet {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<MaskProposal> proposals;

  // Assigns ids 0..n-1 in input order. Throws DimensionError when a mask's
  // grid differs from width x height and InvalidInputError on empty masks.
  static MaskProposalSet Create(std::string image_id, int width, int height,
                                std::vector<BinaryMask> masks);

  size_t size() const { return proposals.size(); }
  bool empty() const { return proposals.empty(); }
  const MaskProposal& at(int id) const;
  std::vector<BinaryMask> masks() const;
  bool operator==(const MaskProposalSet&) const = default;
};

// Keeps proposals with area >= min_fraction * width * height, preserving
// order; ids are re-densified.
MaskProposalSet FilterSmall(const MaskProposalSet& set, double min_fraction);

// Greedy pass in descending area (ties: lower id first). A proposal is
// dropped when its IoU with any kept proposal is >= dup_iou. The result is
// ordered by that pass and ids are re-densified.
MaskProposalSet Dedup(const MaskProposalSet& set, double dup_iou);

}  // namespace refseg

#endif  // REFSEG_MASK_H_
