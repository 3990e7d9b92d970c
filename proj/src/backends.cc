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

#include "refseg/backends.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "refseg/http_backends.h"
#include "refseg/mock_backends.h"

namespace refseg {
namespace fs = std::filesystem;

std::string_view RoleName(BackendRole role) {
  switch (role) {
    case BackendRole::kMllm:
      return "mllm";
    case BackendRole::kEmbedder:
      return "embedder";
    case BackendRole::kSegmenter:
      return "segmenter";
  }
  return "unknown";
}

BackendRole ParseRole(std::string_view name) {
  if (name == "mllm") return BackendRole::kMllm;
  if (name == "embedder") return BackendRole::kEmbedder;
  if (name == "segmenter") return BackendRole::kSegmenter;
  throw ConfigError("unknown backend role '" + std::string(name) + "'");
}

nlohmann::json DescriptorToJson(const BackendDescriptor& d) {
  return {{"role", RoleName(d.role)},
          {"backend_id", d.backend_id},
          {"endpoint", d.endpoint},
          {"timeout", d.timeout_seconds},
          {"max_retries", d.max_retries}};
}

BackendDescriptor DescriptorFromJson(const nlohmann::json& j) {
  try {
    BackendDescriptor d;
    d.role = ParseRole(j.at("role").get<std::string>());
    d.backend_id = j.at("backend_id").get<std::string>();
    d.endpoint = j.at("endpoint").get<std::string>();
    d.timeout_seconds = j.value("timeout", d.timeout_seconds);
    d.max_retries = j.value("max_retries", d.max_retries);
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad backend descriptor: ") + e.what());
  }
}

void ValidateDescriptors(const std::vector<BackendDescriptor>& descriptors) {
  std::set<std::string> ids;
  for (const auto& d : descriptors) {
    if (d.backend_id.empty()) throw ConfigError("backend_id must be non-empty");
    if (!ids.insert(d.backend_id).second) {
      throw ConfigError("duplicate backend_id '" + d.backend_id + "'");
    }
    if (!(d.timeout_seconds > 0)) {
      throw ConfigError("backend '" + d.backend_id + "' needs timeout > 0");
    }
    if (d.max_retries < 0) {
      throw ConfigError("backend '" + d.backend_id + "' has negative max_retries");
    }
  }
}

std::vector<BackendDescriptor> LoadDescriptors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read backend descriptors " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!j.contains("backends") || !j["backends"].is_array()) {
    throw ConfigError(path + ": expected {\"backends\": [...]}");
  }
  std::vector<BackendDescriptor> out;
  for (const auto& item : j["backends"]) out.push_back(DescriptorFromJson(item));
  ValidateDescriptors(out);
  return out;
}

void SleepFor(const RetryPolicy& policy, std::chrono::milliseconds delay) {
  if (policy.sleep) {
    policy.sleep(delay);
  } else {
    std::this_thread::sleep_for(delay);
  }
}

InFlightLimiter::InFlightLimiter(int limit) : sem_(std::max(1, limit)) {}

namespace {

class LimitedMllm : public MllmBackend {
 public:
  LimitedMllm(std::shared_ptr<MllmBackend> inner, int limit)
      : inner_(std::move(inner)), limiter_(limit) {}
  const std::string& id() const override { return inner_->id(); }
  std::string Complete(std::span<const RgbImage> images,
                       const std::string& prompt) override {
    InFlightLimiter::Slot slot(limiter_);
    return inner_->Complete(images, prompt);
  }

 private:
  std::shared_ptr<MllmBackend> inner_;
  InFlightLimiter limiter_;
};

class LimitedEmbedder : public Embedder {
 public:
  LimitedEmbedder(std::shared_ptr<Embedder> inner, int limit)
      : inner_(std::move(inner)), limiter_(limit) {}
  const std::string& id() const override { return inner_->id(); }
  int dimension() const override { return inner_->dimension(); }
  std::vector<float> EmbedText(const std::string& text) override {
    InFlightLimiter::Slot slot(limiter_);
    return inner_->EmbedText(text);
  }
  std::vector<float> EmbedImage(const RgbImage& image) override {
    InFlightLimiter::Slot slot(limiter_);
    return inner_->EmbedImage(image);
  }

 private:
  std::shared_ptr<Embedder> inner_;
  InFlightLimiter limiter_;
};

class LimitedSegmenter : public Segmenter {
 public:
  LimitedSegmenter(std::shared_ptr<Segmenter> inner, int limit)
      : inner_(std::move(inner)), limiter_(limit) {}
  const std::string& id() const override { return inner_->id(); }
  std::vector<BinaryMask> Segment(const RgbImage& image,
                                  std::span<const Point> points) override {
    InFlightLimiter::Slot slot(limiter_);
    return inner_->Segment(image, points);
  }

 private:
  std::shared_ptr<Segmenter> inner_;
  InFlightLimiter limiter_;
};

std::string MockTarget(const BackendDescriptor& d, const std::string& base_dir) {
  std::string target = d.endpoint.substr(5);
  if (!target.empty() && fs::path(target).is_relative() && !base_dir.empty()) {
    target = (fs::path(base_dir) / target).string();
  }
  return target;
}

bool IsMock(const BackendDescriptor& d) { return d.endpoint.rfind("mock:", 0) == 0; }

bool IsHttp(const BackendDescriptor& d) {
  return d.endpoint.rfind("http://", 0) == 0 ||
         d.endpoint.rfind("https://", 0) == 0;
}

}  // namespace

std::shared_ptr<MllmBackend> LimitInFlight(std::shared_ptr<MllmBackend> inner,
                                           int limit) {
  return std::make_shared<LimitedMllm>(std::move(inner), limit);
}
std::shared_ptr<Embedder> LimitInFlight(std::shared_ptr<Embedder> inner,
                                        int limit) {
  return std::make_shared<LimitedEmbedder>(std::move(inner), limit);
}
std::shared_ptr<Segmenter> LimitInFlight(std::shared_ptr<Segmenter> inner,
                                         int limit) {
  return std::make_shared<LimitedSegmenter>(std::move(inner), limit);
}

Backends MakeBackends(const std::vector<BackendDescriptor>& descriptors,
                      const std::string& base_dir, int in_flight_limit) {
  ValidateDescriptors(descriptors);
  Backends out;
  for (const auto& d : descriptors) {
    if (!IsMock(d) && !IsHttp(d)) {
      throw ConfigError("backend '" + d.backend_id + "' has unsupported endpoint '" +
                        d.endpoint + "'");
    }
    switch (d.role) {
      case BackendRole::kMllm: {
        if (out.mllm) throw ConfigError("more than one mllm backend configured");
        std::shared_ptr<MllmBackend> b;
        if (IsMock(d)) {
          const std::string path = MockTarget(d, base_dir);
          std::ifstream in(path);
          if (!in) throw ConfigError("cannot read mock script " + path);
          nlohmann::json script;
          try {
            script = nlohmann::json::parse(in);
          } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(path + ": " + e.what());
          }
          // The descriptor id wins so the cache layout follows the config.
          script["backend_id"] = d.backend_id;
          b = ScriptedMllm::FromJson(script);
        } else {
          b = std::make_shared<HttpMllmClient>(d, DefaultRetryPolicy(d.max_retries));
        }
        out.mllm = LimitInFlight(std::move(b), in_flight_limit);
        break;
      }
      case BackendRole::kEmbedder: {
        if (out.embedder) throw ConfigError("more than one embedder backend configured");
        std::shared_ptr<Embedder> b;
        if (IsMock(d)) {
          b = std::make_shared<HashEmbedder>(d.backend_id);
        } else {
          b = std::make_shared<HttpEmbedderClient>(d, DefaultRetryPolicy(d.max_retries));
        }
        out.embedder = LimitInFlight(std::move(b), in_flight_limit);
        break;
      }
      case BackendRole::kSegmenter: {
        if (out.segmenter) throw ConfigError("more than one segmenter backend configured");
        std::shared_ptr<Segmenter> b;
        if (IsMock(d)) {
          b = std::make_shared<FixtureSegmenter>(MockTarget(d, base_dir), d.backend_id);
        } else {
          b = std::make_shared<HttpSegmenterClient>(d, DefaultRetryPolicy(d.max_retries));
        }
        out.segmenter = LimitInFlight(std::move(b), in_flight_limit);
        break;
      }
    }
  }
  if (!out.mllm) throw ConfigError("no mllm backend configured");
  if (!out.embedder) throw ConfigError("no embedder backend configured");
  return out;
}

}  // namespace refseg
