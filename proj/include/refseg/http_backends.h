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

#ifndef REFSEG_HTTP_BACKENDS_H_
#define REFSEG_HTTP_BACKENDS_H_

#include <atomic>
#include <string>

#include <nlohmann/json.hpp>

#include "refseg/backends.h"

namespace refseg {

// Shared transport: POSTs JSON to `base_url + path` with retries. Transport
// failures, 429 and 5xx replies are retryable; other non-2xx replies raise a
// non-retryable BackendError carrying the {code, message} body.
class HttpTransport {
 public:
  HttpTransport(const BackendDescriptor& descriptor, RetryPolicy policy);

  nlohmann::json Post(const std::string& path, const nlohmann::json& body);
  std::string NextRequestId();
  const std::string& id() const { return id_; }
  // Attempts made by the most recent Post on any thread.
  int last_attempts() const { return last_attempts_.load(); }

 private:
  nlohmann::json PostOnce(const std::string& path, const std::string& body);

  std::string id_;
  std::string base_url_;
  double timeout_seconds_;
  RetryPolicy policy_;
  std::atomic<int64_t> next_id_{0};
  std::atomic<int> last_attempts_{0};
};

RetryPolicy DefaultRetryPolicy(int max_retries);

class HttpMllmClient : public MllmBackend {
 public:
  explicit HttpMllmClient(const BackendDescriptor& d,
                          RetryPolicy policy = DefaultRetryPolicy(3));
  const std::string& id() const override { return transport_.id(); }
  std::string Complete(std::span<const RgbImage> images,
                       const std::string& prompt) override;
  HttpTransport& transport() { return transport_; }

 private:
  HttpTransport transport_;
};

class HttpEmbedderClient : public Embedder {
 public:
  // The dimension is learnt from the first reply and enforced afterwards.
  explicit HttpEmbedderClient(const BackendDescriptor& d,
                              RetryPolicy policy = DefaultRetryPolicy(3));
  const std::string& id() const override { return transport_.id(); }
  int dimension() const override { return dimension_.load(); }
  std::vector<float> EmbedText(const std::string& text) override;
  std::vector<float> EmbedImage(const RgbImage& image) override;

 private:
  std::vector<float> Check(std::vector<float> v);
  HttpTransport transport_;
  std::atomic<int> dimension_{0};
};

class HttpSegmenterClient : public Segmenter {
 public:
  explicit HttpSegmenterClient(const BackendDescriptor& d,
                               RetryPolicy policy = DefaultRetryPolicy(3));
  const std::string& id() const override { return transport_.id(); }
  std::vector<BinaryMask> Segment(const RgbImage& image,
                                  std::span<const Point> points) override;

 private:
  HttpTransport transport_;
};

}  // namespace refseg

#endif  // REFSEG_HTTP_BACKENDS_H_
