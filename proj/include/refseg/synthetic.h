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

#ifndef REFSEG_SYNTHETIC_H_
#define REFSEG_SYNTHETIC_H_

#include <string>
#include <vector>

// Built-in five-sample offline benchmark: flat-colour scenes with proposal
// fixtures and a scripted MLLM whose answers are keyed on the rendered
// visual prompts.
//
//   chair  "mesh backrest"                 single proposal, both decisions yes
//   sofa   "all legs of the sofa"          four leg proposals, union is the target
//   room   "the cat sleeping on the sofa"  absent target, explanation expected
//   lamps  "the lamp that is switched on"  decoy whose text embeds closer
//   mugs   "the red mug"                   text-only tier, handle missed (10/11)

namespace refseg::synthetic {

inline constexpr char kDatasetFile[] = "dataset.json";
inline constexpr char kScriptFile[] = "mllm_script.json";
inline constexpr char kConfigFile[] = "backends.json";
inline constexpr char kFixturesDir[] = "fixtures";
inline constexpr char kImagesDir[] = "images";

inline constexpr int kSize = 100;

// Writes images/, fixtures/, the MLLM script, a mock run config and the
// ares_json manifest under `dir` (created if needed). Output is
// byte-identical on every call.
void WriteFixtures(const std::string& dir);

std::vector<std::string> SampleIds();

}  // namespace refseg::synthetic

#endif  // REFSEG_SYNTHETIC_H_
