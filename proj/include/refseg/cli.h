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

#ifndef REFSEG_CLI_H_
#define REFSEG_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace refseg {

// Exit codes.
inline constexpr int kExitMask = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitBackendError = 2;
inline constexpr int kExitExplanation = 3;
inline constexpr int kExitInterrupted = 130;

// `args` excludes the program name:
//   segment --image I --expression E [--out DIR] ...
//   eval    --dataset D --format F [--kinds K] [--threshold T] ...
//   render  --image I --mask M [--kinds K] [--out DIR]
//   cache   list|purge [--backend ID] [--cache-dir DIR]
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace refseg

#endif  // REFSEG_CLI_H_
