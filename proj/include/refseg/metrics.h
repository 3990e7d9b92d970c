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

#ifndef REFSEG_METRICS_H_
#define REFSEG_METRICS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "refseg/mask.h"
#include "refseg/selection.h"

namespace refseg {

struct SampleScore {
  int64_t intersection = 0;
  int64_t union_area = 0;
  double iou = 0.0;
  bool operator==(const SampleScore&) const = default;
};

// Mask vs mask is plain IoU. A no-target sample answered with the
// explanation scores 1 with (0, 0) counts; the other mixed cases score 0 and
// count the present mask as the union. Throws DimensionError on mismatch.
SampleScore ComputeSampleIou(const SelectionResult& predicted,
                             const std::optional<BinaryMask>& gt);

// How no-target samples enter the aggregates.
enum class NoTargetPolicy {
  kScoreRejection,  // scored with the convention above
  kSkip,            // left out of gIoU and cIoU
};
std::string_view NoTargetPolicyName(NoTargetPolicy p);
NoTargetPolicy ParseNoTargetPolicy(std::string_view name);

struct SampleRow {
  std::string sample_id;
  int64_t intersection = 0;
  int64_t union_area = 0;
  double iou = 0.0;
  std::string outcome;   // "mask" / "explanation", empty on error
  std::string source;
  std::string tier;
  std::vector<int> chosen_ids;
  bool scored = true;    // false for errors and skipped samples
  std::string error;     // non-empty iff the sample failed

  nlohmann::json ToJson() const;
  static SampleRow FromJson(const nlohmann::json& j);
  bool operator==(const SampleRow&) const = default;
};

struct EvalReport {
  std::vector<SampleRow> per_sample;
  double giou = 0.0;
  double ciou = 0.0;
  int scored = 0;
  int errors = 0;
  std::string fingerprint;

  nlohmann::json ToJson() const;
  static EvalReport FromJson(const nlohmann::json& j);
};

// gIoU is the mean iou of the scored rows; cIoU is their summed intersection
// over summed union (1 when every union is empty). Throws InvalidInputError
// when no row is scored.
EvalReport Aggregate(std::vector<SampleRow> rows, std::string fingerprint = "");

struct TableRow {
  std::string label;
  double giou = 0.0;
  double ciou = 0.0;
  int scored = 0;
  int errors = 0;
};

// Fixed-width text table, scores in percent with one decimal.
std::string RenderTable(const std::string& title, const std::vector<TableRow>& rows);

}  // namespace refseg

#endif  // REFSEG_METRICS_H_
