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

#include "refseg/metrics.h"

#include <algorithm>
#include <cstdio>

#include "refseg/errors.h"

namespace refseg {

SampleScore ComputeSampleIou(const SelectionResult& predicted,
                             const std::optional<BinaryMask>& gt) {
  const bool has_mask = predicted.outcome == Outcome::kMask && predicted.mask;
  if (has_mask && gt) {
    if (!predicted.mask->SameGrid(*gt)) {
      throw DimensionError("prediction and ground truth grids differ");
    }
    const int64_t inter = IntersectionArea(*predicted.mask, *gt);
    const int64_t uni = Area(*predicted.mask) + Area(*gt) - inter;
    return {inter, uni, uni == 0 ? 1.0 : static_cast<double>(inter) / uni};
  }
  if (!has_mask && !gt) return {0, 0, 1.0};
  if (!has_mask) return {0, Area(*gt), 0.0};
  return {0, Area(*predicted.mask), 0.0};
}

std::string_view NoTargetPolicyName(NoTargetPolicy p) {
  return p == NoTargetPolicy::kSkip ? "skip" : "score_rejection";
}

NoTargetPolicy ParseNoTargetPolicy(std::string_view name) {
  if (name == "score_rejection") return NoTargetPolicy::kScoreRejection;
  if (name == "skip") return NoTargetPolicy::kSkip;
  throw ConfigError("unknown no-target policy: " + std::string(name));
}

nlohmann::json SampleRow::ToJson() const {
  nlohmann::json j = {{"sample_id", sample_id},
                      {"intersection", intersection},
                      {"union", union_area},
                      {"iou", iou},
                      {"scored", scored}};
  if (error.empty()) {
    j["outcome"] = outcome;
    j["source"] = source;
    j["tier"] = tier;
    j["chosen_ids"] = chosen_ids;
  } else {
    j["error"] = error;
  }
  return j;
}

SampleRow SampleRow::FromJson(const nlohmann::json& j) {
  SampleRow r;
  r.sample_id = j.at("sample_id").get<std::string>();
  r.intersection = j.at("intersection").get<int64_t>();
  r.union_area = j.at("union").get<int64_t>();
  r.iou = j.at("iou").get<double>();
  r.scored = j.at("scored").get<bool>();
  r.error = j.value("error", std::string());
  r.outcome = j.value("outcome", std::string());
  r.source = j.value("source", std::string());
  r.tier = j.value("tier", std::string());
  if (j.contains("chosen_ids")) r.chosen_ids = j["chosen_ids"].get<std::vector<int>>();
  return r;
}

nlohmann::json EvalReport::ToJson() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : per_sample) rows.push_back(r.ToJson());
  return {{"config_fingerprint", fingerprint},
          {"giou", giou},
          {"ciou", ciou},
          {"scored", scored},
          {"errors", errors},
          {"per_sample", rows}};
}

EvalReport EvalReport::FromJson(const nlohmann::json& j) {
  EvalReport r;
  for (const auto& row : j.at("per_sample")) r.per_sample.push_back(SampleRow::FromJson(row));
  r.giou = j.at("giou").get<double>();
  r.ciou = j.at("ciou").get<double>();
  r.scored = j.at("scored").get<int>();
  r.errors = j.at("errors").get<int>();
  r.fingerprint = j.value("config_fingerprint", std::string());
  return r;
}

EvalReport Aggregate(std::vector<SampleRow> rows, std::string fingerprint) {
  EvalReport report;
  double iou_sum = 0.0;
  int64_t inter = 0, uni = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) ++report.errors;
    if (!r.scored) continue;
    ++report.scored;
    iou_sum += r.iou;
    inter += r.intersection;
    uni += r.union_area;
  }
  if (report.scored == 0) throw InvalidInputError("no scored samples to aggregate");
  report.giou = iou_sum / report.scored;
  report.ciou = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  report.per_sample = std::move(rows);
  report.fingerprint = std::move(fingerprint);
  return report;
}

std::string RenderTable(const std::string& title, const std::vector<TableRow>& rows) {
  size_t width = 6;
  for (const auto& r : rows) width = std::max(width, r.label.size());
  std::string out = title.empty() ? "" : title + "\n";
  char buf[256];
  std::string rule(width + 34, '-');
  std::snprintf(buf, sizeof(buf), "%-*s %8s %8s %7s %6s\n", static_cast<int>(width),
                "config", "gIoU", "cIoU", "scored", "errors");
  out += rule + "\n" + buf + rule + "\n";
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-*s %8.1f %8.1f %7d %6d\n",
                  static_cast<int>(width), r.label.c_str(), 100.0 * r.giou,
                  100.0 * r.ciou, r.scored, r.errors);
    out += buf;
  }
  return out + rule + "\n";
}

}  // namespace refseg
