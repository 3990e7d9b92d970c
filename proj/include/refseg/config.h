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

#ifndef REFSEG_CONFIG_H_
#define REFSEG_CONFIG_H_

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "refseg/backends.h"
#include "refseg/dataset.h"
#include "refseg/metrics.h"
#include "refseg/pipeline.h"

namespace refseg {

// Everything a segment or eval run depends on. The backend config file
// format is a RunConfig file holding only "backends".
struct RunConfig {
  std::vector<BackendDescriptor> backends;
  // Directory that relative mock endpoints resolve against.
  std::string base_dir;
  PipelineConfig pipeline;
  DatasetFormat dataset_format = DatasetFormat::kAresJson;
  std::string dataset_path;
  // When set, proposals come from {fixtures_dir}/{image_id}.json.
  std::string fixtures_dir;
  std::string output_dir = "out";
  int repeats = 1;
  int workers = 4;
  NoTargetPolicy no_target = NoTargetPolicy::kScoreRejection;
  // Empty keeps the cache in memory.
  std::string cache_dir;

  // Throws ConfigError.
  void Validate() const;
  nlohmann::json ToJson() const;
  // Relative paths in `j` resolve against `base_dir`.
  static RunConfig FromJson(const nlohmann::json& j, const std::string& base_dir);
  static RunConfig FromFile(const std::string& path);

  // sha256 over the settings that can change results plus the content of
  // every file they name (mock scripts, dataset, fixtures). Output paths,
  // cache location and parallelism are left out.
  std::string Fingerprint() const;
};

// sha256 of a file, or of the sorted (name, sha256) list of a directory's
// regular files. Empty string when the path does not exist.
std::string DigestPath(const std::string& path);

}  // namespace refseg

#endif  // REFSEG_CONFIG_H_
