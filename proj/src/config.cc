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

#include "refseg/config.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "refseg/errors.h"
#include "refseg/hashing.h"

namespace refseg {
namespace fs = std::filesystem;

namespace {

std::string Resolve(const std::string& base, const std::string& p) {
  if (p.empty() || base.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

std::string FileDigest(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return Sha256Hex(ss.str());
}

}  // namespace

std::string DigestPath(const std::string& path) {
  if (path.empty() || !fs::exists(path)) return "";
  if (!fs::is_directory(path)) return FileDigest(path);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(path)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string listing;
  for (const auto& f : files) {
    listing += f.filename().string() + " " + FileDigest(f) + "\n";
  }
  return Sha256Hex(listing);
}

void RunConfig::Validate() const {
  ValidateDescriptors(backends);
  bool mllm = false, embedder = false;
  for (const auto& d : backends) {
    mllm |= d.role == BackendRole::kMllm;
    embedder |= d.role == BackendRole::kEmbedder;
  }
  if (!mllm) throw ConfigError("no mllm backend configured");
  if (!embedder) throw ConfigError("no embedder backend configured");
  pipeline.Validate();
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
}

nlohmann::json RunConfig::ToJson() const {
  nlohmann::json descs = nlohmann::json::array();
  for (const auto& d : backends) descs.push_back(DescriptorToJson(d));
  nlohmann::json j = pipeline.ToJson();
  j["backends"] = descs;
  j["in_flight"] = pipeline.in_flight;
  j["dataset"] = {{"format", DatasetFormatName(dataset_format)}, {"path", dataset_path}};
  j["fixtures"] = fixtures_dir;
  j["output_dir"] = output_dir;
  j["repeats"] = repeats;
  j["workers"] = workers;
  j["no_target_policy"] = NoTargetPolicyName(no_target);
  j["cache_dir"] = cache_dir;
  return j;
}

RunConfig RunConfig::FromJson(const nlohmann::json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  RunConfig c;
  c.base_dir = base_dir;
  c.pipeline = PipelineConfig::FromJson(j);
  try {
    if (j.contains("backends")) {
      for (const auto& d : j["backends"]) c.backends.push_back(DescriptorFromJson(d));
    }
    if (j.contains("dataset")) {
      const auto& d = j["dataset"];
      if (d.contains("format")) c.dataset_format = ParseDatasetFormat(d["format"].get<std::string>());
      c.dataset_path = Resolve(base_dir, d.value("path", std::string()));
    }
    c.fixtures_dir = Resolve(base_dir, j.value("fixtures", std::string()));
    c.output_dir = j.value("output_dir", c.output_dir);
    c.repeats = j.value("repeats", c.repeats);
    c.workers = j.value("workers", c.workers);
    if (j.contains("no_target_policy")) {
      c.no_target = ParseNoTargetPolicy(j["no_target_policy"].get<std::string>());
    }
    c.cache_dir = Resolve(base_dir, j.value("cache_dir", std::string()));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad run config: ") + e.what());
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig RunConfig::FromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return FromJson(j, fs::path(path).parent_path().string());
}

std::string RunConfig::Fingerprint() const {
  nlohmann::json descs = nlohmann::json::array();
  for (const auto& d : backends) {
    nlohmann::json dj = DescriptorToJson(d);
    if (d.endpoint.rfind("mock:", 0) == 0) {
      dj["content"] = DigestPath(Resolve(base_dir, d.endpoint.substr(5)));
    }
    descs.push_back(dj);
  }
  const nlohmann::json canonical = {
      {"backends", descs},
      {"pipeline", pipeline.ToJson()},
      {"dataset",
       {{"format", DatasetFormatName(dataset_format)},
        {"content", DigestPath(dataset_path)}}},
      {"fixtures", DigestPath(fixtures_dir)},
      {"repeats", repeats},
      {"no_target_policy", NoTargetPolicyName(no_target)}};
  return Sha256Hex(canonical.dump());
}

}  // namespace refseg
