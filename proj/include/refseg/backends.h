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

#ifndef REFSEG_BACKENDS_H_
#define REFSEG_BACKENDS_H_

#include <chrono>
#include <functional>
#include <memory>
#include <semaphore>
#include <span>
#include <string>
#include <vector>

#include "refseg/errors.h"
#include "refseg/image.h"
#include "refseg/mask.h"

namespace refseg {

struct Point {
  int x = 0;
  int y = 0;
  bool operator==(const Point&) const = default;
};

inline constexpr int kMaxImagesPerRequest = 4;

// Multimodal language model. Implementations decode greedily
// (temperature 0) so identical requests give identical completions.
class MllmBackend {
 public:
  virtual ~MllmBackend() = default;
  virtual const std::string& id() const = 0;
  virtual std::string Complete(std::span<const RgbImage> images,
                               const std::string& prompt) = 0;
};

// Joint text/image embedding model. Vectors have fixed dimension() and
// unit L2 norm.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual const std::string& id() const = 0;
  virtual int dimension() const = 0;
  virtual std::vector<float> EmbedText(const std::string& text) = 0;
  virtual std::vector<float> EmbedImage(const RgbImage& image) = 0;
};

// Point-prompted class-agnostic segmenter. Returned masks must match the
// image grid; implementations throw DimensionError otherwise.
class Segmenter {
 public:
  virtual ~Segmenter() = default;
  virtual const std::string& id() const = 0;
  virtual std::vector<BinaryMask> Segment(const RgbImage& image,
                                          std::span<const Point> points) = 0;
};

enum class BackendRole { kMllm, kEmbedder, kSegmenter };
std::string_view RoleName(BackendRole role);
BackendRole ParseRole(std::string_view name);

struct BackendDescriptor {
  BackendRole role = BackendRole::kMllm;
  std::string backend_id;
  // "http://host:port" or "mock:<path>" (relative paths resolve against
  // the descriptor file's directory).
  std::string endpoint;
  double timeout_seconds = 60.0;
  int max_retries = 3;
};

nlohmann::json DescriptorToJson(const BackendDescriptor& d);
BackendDescriptor DescriptorFromJson(const nlohmann::json& j);
// {"backends": [descriptor, ...]}. Validates unique ids and timeouts.
std::vector<BackendDescriptor> LoadDescriptors(const std::string& path);
void ValidateDescriptors(const std::vector<BackendDescriptor>& descriptors);

struct RetryPolicy {
  int max_retries = 3;
  // Doubles after every failed attempt: 1s, 2s, 4s by default.
  std::chrono::milliseconds initial_backoff{1000};
  std::function<void(std::chrono::milliseconds)> sleep;  // null: real sleep
};

// Runs `fn`, retrying retryable BackendErrors up to policy.max_retries
// times. `attempts` receives the number of calls made.
template <typename Fn>
auto WithRetries(const RetryPolicy& policy, Fn&& fn, int* attempts = nullptr)
    -> decltype(fn());

void SleepFor(const RetryPolicy& policy, std::chrono::milliseconds delay);

// Caps concurrent in-flight requests to a shared backend.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(int limit);
  class Slot {
   public:
    explicit Slot(InFlightLimiter& l) : l_(l) { l_.sem_.acquire(); }
    ~Slot() { l_.sem_.release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    InFlightLimiter& l_;
  };

 private:
  std::counting_semaphore<4096> sem_;
};

std::shared_ptr<MllmBackend> LimitInFlight(std::shared_ptr<MllmBackend> inner,
                                           int limit);
std::shared_ptr<Embedder> LimitInFlight(std::shared_ptr<Embedder> inner,
                                        int limit);
std::shared_ptr<Segmenter> LimitInFlight(std::shared_ptr<Segmenter> inner,
                                         int limit);

struct Backends {
  std::shared_ptr<MllmBackend> mllm;
  std::shared_ptr<Embedder> embedder;
  std::shared_ptr<Segmenter> segmenter;  // optional when fixtures are used
};

// Instantiates HTTP clients or mocks from descriptors. A segmenter is not
// required. Throws ConfigError for missing roles or bad endpoints.
Backends MakeBackends(const std::vector<BackendDescriptor>& descriptors,
                      const std::string& base_dir, int in_flight_limit = 8);

// ---------------------------------------------------------------------------

template <typename Fn>
auto WithRetries(const RetryPolicy& policy, Fn&& fn, int* attempts)
    -> decltype(fn()) {
  auto delay = policy.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    if (attempts != nullptr) *attempts = attempt + 1;
    try {
      return fn();
    } catch (const BackendError& e) {
      if (!e.retryable() || attempt >= policy.max_retries) throw;
    }
    SleepFor(policy, delay);
    delay *= 2;
  }
}

}  // namespace refseg

#endif  // REFSEG_BACKENDS_H_
