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

#include "refseg/http_backends.h"

#include <cmath>
#include <sstream>

#include "httplib.h"
#include "refseg/wire.h"

namespace refseg {

RetryPolicy DefaultRetryPolicy(int max_retries) {
  RetryPolicy p;
  p.max_retries = max_retries;
  return p;
}

HttpTransport::HttpTransport(const BackendDescriptor& d, RetryPolicy policy)
    : id_(d.backend_id),
      base_url_(d.endpoint),
      timeout_seconds_(d.timeout_seconds),
      policy_(std::move(policy)) {
  policy_.max_retries = d.max_retries;
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::string HttpTransport::NextRequestId() {
  return id_ + "-" + std::to_string(next_id_.fetch_add(1));
}

nlohmann::json HttpTransport::PostOnce(const std::string& path,
                                       const std::string& body) {
  httplib::Client client(base_url_);
  const auto secs = static_cast<time_t>(timeout_seconds_);
  const auto usecs = static_cast<time_t>(
      std::llround((timeout_seconds_ - static_cast<double>(secs)) * 1e6));
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  auto res = client.Post(path, body, "application/json");
  if (!res) {
    throw BackendError(id_ + " " + path + ": " + httplib::to_string(res.error()),
                       /*retryable=*/true);
  }
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error&) {
    if (res->status >= 200 && res->status < 300) {
      throw ParseError(id_ + " " + path + ": reply is not JSON");
    }
  }
  if (res->status >= 200 && res->status < 300) return reply;
  const auto err = wire::ErrorReply::FromJson(reply);
  std::ostringstream os;
  os << id_ << " " << path << ": HTTP " << res->status;
  if (!err.code.empty()) os << " [" << err.code << "]";
  if (!err.message.empty()) os << " " << err.message;
  const bool retryable = res->status == 429 || res->status >= 500;
  throw BackendError(os.str(), retryable);
}

nlohmann::json HttpTransport::Post(const std::string& path,
                                   const nlohmann::json& body) {
  const std::string payload = body.dump();
  int attempts = 0;
  try {
    auto reply = WithRetries(policy_, [&] { return PostOnce(path, payload); },
                             &attempts);
    last_attempts_ = attempts;
    return reply;
  } catch (...) {
    last_attempts_ = attempts;
    throw;
  }
}

HttpMllmClient::HttpMllmClient(const BackendDescriptor& d, RetryPolicy policy)
    : transport_(d, std::move(policy)) {}

std::string HttpMllmClient::Complete(std::span<const RgbImage> images,
                                     const std::string& prompt) {
  if (images.size() > static_cast<size_t>(kMaxImagesPerRequest)) {
    throw InvalidInputError("too many images in one completion request");
  }
  wire::CompleteRequest req;
  req.request_id = transport_.NextRequestId();
  req.prompt = prompt;
  for (const auto& img : images) req.images.push_back(wire::EncodeImage(img));
  return wire::ParseCompletion(transport_.Post("/complete", req.ToJson()));
}

HttpEmbedderClient::HttpEmbedderClient(const BackendDescriptor& d,
                                       RetryPolicy policy)
    : transport_(d, std::move(policy)) {}

std::vector<float> HttpEmbedderClient::Check(std::vector<float> v) {
  int expected = 0;
  const int got = static_cast<int>(v.size());
  if (!dimension_.compare_exchange_strong(expected, got) && expected != got) {
    throw ParseError(transport_.id() + ": embedding dimension changed");
  }
  double norm = 0.0;
  for (float x : v) norm += static_cast<double>(x) * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) throw ParseError(transport_.id() + ": zero embedding");
  if (std::abs(norm - 1.0) > 1e-6) {
    for (float& x : v) x = static_cast<float>(x / norm);
  }
  return v;
}

std::vector<float> HttpEmbedderClient::EmbedText(const std::string& text) {
  wire::EmbedTextRequest req{transport_.NextRequestId(), text};
  return Check(wire::ParseEmbedding(transport_.Post("/embed_text", req.ToJson())));
}

std::vector<float> HttpEmbedderClient::EmbedImage(const RgbImage& image) {
  wire::EmbedImageRequest req{transport_.NextRequestId(), wire::EncodeImage(image)};
  return Check(wire::ParseEmbedding(transport_.Post("/embed_image", req.ToJson())));
}

HttpSegmenterClient::HttpSegmenterClient(const BackendDescriptor& d,
                                         RetryPolicy policy)
    : transport_(d, std::move(policy)) {}

std::vector<BinaryMask> HttpSegmenterClient::Segment(
    const RgbImage& image, std::span<const Point> points) {
  if (points.empty()) throw InvalidInputError("segment called with no points");
  wire::SegmentRequest req;
  req.request_id = transport_.NextRequestId();
  req.image = wire::EncodeImage(image);
  req.points.assign(points.begin(), points.end());
  auto masks = wire::ParseMasks(transport_.Post("/segment", req.ToJson()));
  for (const auto& m : masks) {
    if (m.width() != image.width() || m.height() != image.height()) {
      throw DimensionError(transport_.id() +
                           ": segmenter returned a mask of the wrong size");
    }
  }
  return masks;
}

}  // namespace refseg
