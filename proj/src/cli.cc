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

#include "refseg/cli.h"

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "refseg/benchmark.h"
#include "refseg/cache.h"
#include "refseg/config.h"
#include "refseg/errors.h"
#include "refseg/hashing.h"
#include "refseg/image.h"
#include "refseg/synthetic.h"

namespace refseg {
namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config;
  std::string image;
  std::string expression;
  std::string mask;
  std::string image_id;
  std::string out_dir;
  std::string kinds;
  std::string fixtures;
  std::string cache_dir;
  std::string selector;
  std::string no_target;
  std::string dataset;
  std::string format;
  std::string backend;
  double threshold = 1.0;
  int repeats = 1;
  int workers = 4;
  int bbox_line_width = 0;
  int contour_line_width = 0;
  int blur_radius = -1;
  bool no_combined = false;
};

// Options shared by segment and eval, tracked so unset flags leave the
// config file alone.
struct Given {
  CLI::Option* threshold = nullptr;
  CLI::Option* bbox = nullptr;
  CLI::Option* contour = nullptr;
  CLI::Option* blur = nullptr;
  CLI::Option* repeats = nullptr;
  CLI::Option* workers = nullptr;
};

bool Set(const CLI::Option* o) { return o != nullptr && o->count() > 0; }

std::string Env(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

void AddRenderFlags(CLI::App* app, Flags& f, Given& g) {
  g.bbox = app->add_option("--bbox-line-width", f.bbox_line_width,
                           "Bounding box band width (0: from image size)");
  g.contour = app->add_option("--contour-line-width", f.contour_line_width,
                              "Contour width (0: from image size)");
  g.blur = app->add_option("--blur-radius", f.blur_radius,
                           "Background blur radius (-1: from image size)");
}

void AddPipelineFlags(CLI::App* app, Flags& f, Given& g) {
  app->add_option("--config", f.config, "Run config JSON (default: $RES_BACKEND_CONFIG)");
  app->add_option("--out", f.out_dir, "Output directory");
  app->add_option("--kinds", f.kinds, "Visual prompt kinds, comma separated");
  g.threshold = app->add_option("--threshold", f.threshold, "Score fallback threshold");
  app->add_option("--fixtures", f.fixtures, "Proposal fixtures instead of the segmenter");
  app->add_option("--cache-dir", f.cache_dir, "Completion cache (default: $RES_CACHE_DIR)");
  app->add_option("--selector", f.selector, "full | clip_only | decisions_only");
  app->add_flag("--no-combined", f.no_combined, "Never offer the union of a tier");
  AddRenderFlags(app, f, g);
}

RunConfig BuildConfig(const Flags& f, const Given& g, const std::string& fallback_config) {
  std::string path = f.config.empty() ? Env("RES_BACKEND_CONFIG") : f.config;
  if (path.empty()) path = fallback_config;
  RunConfig c;
  if (!path.empty()) c = RunConfig::FromFile(path);
  if (const std::string env_cache = Env("RES_CACHE_DIR"); !env_cache.empty()) {
    c.cache_dir = env_cache;
  }
  if (!f.cache_dir.empty()) c.cache_dir = f.cache_dir;
  if (!f.out_dir.empty()) c.output_dir = f.out_dir;
  if (!f.kinds.empty()) c.pipeline.kinds = ParseKinds(f.kinds);
  if (Set(g.threshold)) c.pipeline.selection.threshold = f.threshold;
  if (!f.selector.empty()) c.pipeline.selection.mode = ParseSelectorMode(f.selector);
  if (f.no_combined) c.pipeline.selection.allow_combined = false;
  if (!f.fixtures.empty()) c.fixtures_dir = f.fixtures;
  if (Set(g.bbox)) c.pipeline.render.bbox_line_width = f.bbox_line_width;
  if (Set(g.contour)) c.pipeline.render.contour_line_width = f.contour_line_width;
  if (Set(g.blur)) c.pipeline.render.blur_radius = f.blur_radius;
  if (Set(g.repeats)) c.repeats = f.repeats;
  if (Set(g.workers)) c.workers = f.workers;
  if (!f.no_target.empty()) c.no_target = ParseNoTargetPolicy(f.no_target);
  if (!f.format.empty()) c.dataset_format = ParseDatasetFormat(f.format);
  if (!f.dataset.empty()) c.dataset_path = f.dataset;
  if (c.backends.empty()) {
    throw ConfigError("no backends configured; pass --config or set RES_BACKEND_CONFIG");
  }
  c.Validate();
  return c;
}

void WriteFile(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << text;
}

MaskProposalSet FixtureFor(const std::string& fixtures, const std::string& image_id,
                           const SegmenterConfig& cfg) {
  const fs::path p = fs::is_directory(fixtures) ? fs::path(fixtures) / (image_id + ".json")
                                                : fs::path(fixtures);
  return LoadFixtureProposals(p.string(), cfg);
}

int CmdSegment(const Flags& f, const Given& g, std::ostream& out) {
  const RunConfig c = BuildConfig(f, g, "");
  const RgbImage image = LoadImage(f.image);
  const Expression expression(f.expression);
  const std::string image_id = fs::path(f.image).stem().string();

  Pipeline pipeline(c.pipeline, MakeBackends(c.backends, c.base_dir, c.pipeline.in_flight),
                    std::make_shared<CompletionCache>(c.cache_dir));
  MaskProposalSet proposals = c.fixtures_dir.empty()
                                  ? pipeline.Propose(image_id, image)
                                  : FixtureFor(c.fixtures_dir, image_id, c.pipeline.segmenter);
  const SampleOutput result = pipeline.Run(image, expression, std::move(proposals));

  const std::string fp = c.Fingerprint();
  const fs::path dir(c.output_dir);
  const nlohmann::json result_json = {{"config_fingerprint", fp},
                                      {"image_hash", ImageHash(image)},
                                      {"expression", expression.text()},
                                      {"result", result.result.ToJson()}};
  WriteFile(dir / "result.json", result_json.dump(2) + "\n");
  nlohmann::json texts = result.TextsToJson();
  texts["config_fingerprint"] = fp;
  WriteFile(dir / "texts.json", texts.dump(2) + "\n");

  if (result.result.outcome == Outcome::kMask) {
    fs::remove(dir / "explanation.json");
    const fs::path overlay = dir / "overlay.png";
    WritePng(RenderOverlay(image, *result.result.mask), overlay.string(),
             {{"config_fingerprint", fp}});
    out << "mask: " << Area(*result.result.mask) << " px ("
        << SourceName(result.result.source) << ", tier " << TierName(result.result.tier)
        << ")\noverlay: " << overlay.string() << "\n";
    return kExitMask;
  }
  fs::remove(dir / "overlay.png");
  const nlohmann::json explanation = {{"config_fingerprint", fp},
                                      {"explanation", result.result.explanation}};
  WriteFile(dir / "explanation.json", explanation.dump(2) + "\n");
  out << "explanation: " << result.result.explanation << "\n";
  return kExitExplanation;
}

extern "C" void OnSigint(int) { RequestStop(); }

int CmdEval(const Flags& f, const Given& g, std::ostream& out) {
  // A synthetic dataset carries its own mock config.
  std::string fallback;
  if (f.format == "synthetic" && !f.dataset.empty()) {
    if (!fs::exists(fs::path(f.dataset) / synthetic::kDatasetFile)) {
      synthetic::WriteFixtures(f.dataset);
    }
    fallback = (fs::path(f.dataset) / synthetic::kConfigFile).string();
  }
  const RunConfig c = BuildConfig(f, g, fallback);
  if (c.dataset_path.empty()) throw ConfigError("no dataset given (--dataset)");
  const std::vector<Sample> samples = LoadDataset(c.dataset_format, c.dataset_path);
  const std::string fp = c.Fingerprint();

  BenchmarkOptions options;
  options.workers = c.workers;
  options.repeats = c.repeats;
  options.fixtures_dir = c.fixtures_dir;
  options.no_target = c.no_target;
  options.fingerprint = fp;

  ClearStop();
  auto previous = std::signal(SIGINT, OnSigint);
  BenchmarkResult result;
  try {
    result = RunBenchmark(samples, c.pipeline,
                          MakeBackends(c.backends, c.base_dir, c.pipeline.in_flight),
                          std::make_shared<CompletionCache>(c.cache_dir), options);
  } catch (...) {
    std::signal(SIGINT, previous);
    throw;
  }
  std::signal(SIGINT, previous);
  const std::string path = WriteReport(result, c.output_dir);
  out << result.Table() << "report: " << path << "\n";
  return result.interrupted ? kExitInterrupted : 0;
}

int CmdRender(const Flags& f, const Given& g, std::ostream& out) {
  const RgbImage image = LoadImage(f.image);
  std::ifstream in(f.mask);
  if (!in) throw ConfigError("cannot read mask file " + f.mask);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(f.mask + ": " + e.what());
  }
  std::vector<BinaryMask> masks;
  std::string image_id = f.image_id;
  if (j.contains("masks")) {
    ProposalFixture fixture = ParseFixture(j);
    masks = std::move(fixture.masks);
    if (image_id.empty()) image_id = fixture.image_id;
  } else {
    masks.push_back(MaskFromJson(j));
  }
  if (image_id.empty()) image_id = fs::path(f.image).stem().string();
  for (const auto& m : masks) {
    if (m.width() != image.width() || m.height() != image.height()) {
      throw DimensionError("mask is " + std::to_string(m.width()) + "x" +
                           std::to_string(m.height()) + ", image is " +
                           std::to_string(image.width()) + "x" +
                           std::to_string(image.height()));
    }
  }
  const std::vector<PromptKind> kinds = f.kinds.empty() ? DefaultKinds() : ParseKinds(f.kinds);
  RenderOptions options;
  if (Set(g.bbox)) options.bbox_line_width = f.bbox_line_width;
  if (Set(g.contour)) options.contour_line_width = f.contour_line_width;
  if (Set(g.blur)) options.blur_radius = f.blur_radius;
  const std::string fp = Sha256Hex(nlohmann::json{
      {"kinds", JoinKinds(kinds)},
      {"bbox_line_width", options.bbox_line_width},
      {"contour_line_width", options.contour_line_width},
      {"blur_radius", options.blur_radius}}.dump());

  const fs::path dir(f.out_dir.empty() ? "out" : f.out_dir);
  fs::create_directories(dir);
  for (size_t i = 0; i < masks.size(); ++i) {
    for (PromptKind k : kinds) {
      const fs::path p = dir / (image_id + "_" + std::to_string(i) + "_" +
                               std::string(KindName(k)) + ".png");
      WritePng(RenderKind(image, masks[i], k, options), p.string(),
               {{"config_fingerprint", fp}});
      out << p.string() << "\n";
    }
  }
  return 0;
}

int CmdCache(const std::string& action, const Flags& f, std::ostream& out) {
  std::string dir = f.cache_dir.empty() ? Env("RES_CACHE_DIR") : f.cache_dir;
  if (dir.empty()) {
    const std::string cfg = f.config.empty() ? Env("RES_BACKEND_CONFIG") : f.config;
    if (!cfg.empty()) dir = RunConfig::FromFile(cfg).cache_dir;
  }
  if (dir.empty()) throw ConfigError("no cache directory (--cache-dir or RES_CACHE_DIR)");
  CompletionCache cache(dir);
  std::optional<std::string> backend;
  if (!f.backend.empty()) backend = f.backend;
  if (action == "list") {
    const auto entries = cache.List(backend);
    for (const auto& e : entries) {
      out << e.backend_id << " " << e.digest << " " << e.timestamp << "\n";
    }
    out << entries.size() << " entries\n";
  } else {
    out << "purged " << cache.Purge(backend) << " entries\n";
  }
  return 0;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Training-free referring segmentation from mask proposals and an MLLM"};
  app.require_subcommand(1);
  Flags f;
  Given seg_given, eval_given, render_given;

  CLI::App* segment = app.add_subcommand("segment", "Segment one image for one expression");
  segment->add_option("--image", f.image, "Input image")->required();
  segment->add_option("--expression", f.expression, "Referring expression")->required();
  AddPipelineFlags(segment, f, seg_given);

  CLI::App* eval = app.add_subcommand("eval", "Benchmark a dataset and report gIoU/cIoU");
  eval->add_option("--dataset", f.dataset, "Dataset file or directory");
  eval->add_option("--format", f.format, "refcoco_json | reasonseg_dir | ares_json | synthetic");
  eval_given.repeats = eval->add_option("--repeats", f.repeats, "Repeat count");
  eval_given.workers = eval->add_option("--workers", f.workers, "Samples in flight");
  eval->add_option("--no-target-policy", f.no_target, "score_rejection | skip");
  AddPipelineFlags(eval, f, eval_given);

  CLI::App* render = app.add_subcommand("render", "Write the visual prompts of masks");
  render->add_option("--image", f.image, "Input image")->required();
  render->add_option("--mask", f.mask, "Mask JSON or proposal fixture")->required();
  render->add_option("--kinds", f.kinds, "Visual prompt kinds, comma separated");
  render->add_option("--out", f.out_dir, "Output directory");
  render->add_option("--image-id", f.image_id, "Name prefix for the outputs");
  AddRenderFlags(render, f, render_given);

  CLI::App* cache = app.add_subcommand("cache", "Inspect or clear the completion cache");
  cache->require_subcommand(1);
  cache->add_option("--cache-dir", f.cache_dir, "Cache directory (default: $RES_CACHE_DIR)");
  cache->add_option("--config", f.config, "Run config holding cache_dir");
  cache->add_option("--backend", f.backend, "Only entries of this backend id");
  CLI::App* list = cache->add_subcommand("list", "List entries");
  CLI::App* purge = cache->add_subcommand("purge", "Delete entries");
  for (CLI::App* sub : {list, purge}) {
    sub->add_option("--backend", f.backend, "Only entries of this backend id");
    sub->add_option("--cache-dir", f.cache_dir, "Cache directory");
  }

  std::vector<std::string> storage = {"refseg"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (segment->parsed()) return CmdSegment(f, seg_given, out);
    if (eval->parsed()) return CmdEval(f, eval_given, out);
    if (render->parsed()) return CmdRender(f, render_given, out);
    if (list->parsed()) return CmdCache("list", f, out);
    if (purge->parsed()) return CmdCache("purge", f, out);
  } catch (const BackendError& e) {
    err << "backend error: " << e.what() << "\n";
    return kExitBackendError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}

}  // namespace refseg
