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

#ifndef REFSEG_DATASET_H_
#define REFSEG_DATASET_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "refseg/attribute_prompting.h"
#include "refseg/mask.h"

namespace refseg {

// One (image, expression, ground truth) query. A missing gt_mask marks a
// no-target sample.
struct Sample {
  std::string sample_id;
  std::string image_id;
  std::string image_path;
  Expression expression;
  std::optional<BinaryMask> gt_mask;

  bool operator==(const Sample& o) const {
    return sample_id == o.sample_id && image_id == o.image_id &&
           image_path == o.image_path &&
           expression.text() == o.expression.text() && gt_mask == o.gt_mask;
  }
};

enum class DatasetFormat { kRefcocoJson, kReasonsegDir, kAresJson, kSynthetic };

std::string_view DatasetFormatName(DatasetFormat f);
// Throws ConfigError on an unknown name.
DatasetFormat ParseDatasetFormat(std::string_view name);

// Errors are ParseError/DimensionError (or InvalidInputError for an empty
// expression) whose message names the sample and, for JSON documents, the
// line it starts on.
std::vector<Sample> LoadDataset(DatasetFormat format, const std::string& path);

std::vector<Sample> LoadAresJson(const std::string& path);
std::vector<Sample> LoadRefcocoJson(const std::string& path);
std::vector<Sample> LoadReasonsegDir(const std::string& dir);

// Image paths are stored relative to the file's directory.
void SaveAresJson(const std::vector<Sample>& samples, const std::string& path);

// Line (1-based) on which each element of the array stored under the
// top-level `key` starts. Malformed documents give a partial answer.
std::vector<int> ArrayElementLines(std::string_view json_text,
                                   std::string_view key);

// COCO RLE: column-major counts, either a list or the compressed string.
BinaryMask DecodeCocoRle(int width, int height, const nlohmann::json& counts);

}  // namespace refseg

#endif  // REFSEG_DATASET_H_
