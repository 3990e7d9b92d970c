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

#ifndef REFSEG_TESTS_SYNTHETIC_RUN_H_
#define REFSEG_TESTS_SYNTHETIC_RUN_H_

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "refseg/benchmark.h"
#include "refseg/cli.h"
#include "refseg/config.h"
#include "refseg/dataset.h"
#include "refseg/synthetic.h"

namespace refseg::test {

// Runs the mock benchmark over the synthetic fixtures in `dir` in-process.
inline BenchmarkResult RunSynthetic(
    const std::string& dir, const std::function<void(RunConfig&)>& tweak = {},
    const std::function<void(std::vector<Sample>&)>& poison = {}) {
  synthetic::WriteFixtures(dir);
  RunConfig c = RunConfig::FromFile(dir + "/" + synthetic::kConfigFile);
  if (tweak) tweak(c);
  std::vector<Sample> samples = LoadDataset(c.dataset_format, c.dataset_path);
  if (poison) poison(samples);
  BenchmarkOptions o;
  o.workers = c.workers;
  o.repeats = c.repeats;
  o.fixtures_dir = c.fixtures_dir;
  o.no_target = c.no_target;
  o.fingerprint = c.Fingerprint();
  return RunBenchmark(samples, c.pipeline,
                      MakeBackends(c.backends, c.base_dir, c.pipeline.in_flight),
                      std::make_shared<CompletionCache>(c.cache_dir), o);
}

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

// The CLI must not pick up the caller's environment.
inline CliRun Cli(const std::vector<std::string>& args) {
  ::unsetenv("RES_BACKEND_CONFIG");
  ::unsetenv("RES_CACHE_DIR");
  std::ostringstream out, err;
  CliRun r;
  r.code = RunCli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

inline std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// The report path printed by `eval`.
inline std::string ReportPath(const std::string& out) {
  const auto pos = out.rfind("report: ");
  if (pos == std::string::npos) return "";
  std::string p = out.substr(pos + 8);
  while (!p.empty() && (p.back() == '\n' || p.back() == '\r')) p.pop_back();
  return p;
}

}  // namespace refseg::test

#endif  // REFSEG_TESTS_SYNTHETIC_RUN_H_
