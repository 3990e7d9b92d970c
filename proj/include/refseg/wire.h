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

#ifndef REFSEG_WIRE_H_
#define REFSEG_WIRE_H_

// JSON-over-HTTP request/response bodies for the model services.
//
//   POST /complete     {schema_version, request_id, prompt, images[], temperature}
//                      -> {completion}
//   POST /embed_text   {schema_version, request_id, text} -> {embedding[]}
//   POST /embed_image  {schema_version, request_id, image} -> {embedding[]}
//   POST /segment      {schema_version, request_id, image, points[[x,y]...]}
//                      -> {masks[{width,height,counts}]}
//   errors             {code, message} with a non-2xx status
//
// Images travel as base64 PNG. Readers ignore unknown fields; writers emit
// exactly the fields listed above.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "refseg/backends.h"

namespace refseg::wire {

inline constexpr int kSchemaVersion = 1;

struct CompleteRequest {
  std::string request_id;
  std::string prompt;
  std::vector<std::string> images;  // base64 PNG
  double temperature = 0.0;

  nlohmann::json ToJson() const;
  static CompleteRequest FromJson(const nlohmann::json& j);
  bool operator==(const CompleteRequest&) const = default;
};

struct EmbedTextRequest {
  std::string request_id;
  std::string text;

  nlohmann::json ToJson() const;
  static EmbedTextRequest FromJson(const nlohmann::json& j);
  bool operator==(const EmbedTextRequest&) const = default;
};

struct EmbedImageRequest {
  std::string request_id;
  std::string image;  // base64 PNG

  nlohmann::json ToJson() const;
  static EmbedImageRequest FromJson(const nlohmann::json& j);
  bool operator==(const EmbedImageRequest&) const = default;
};

struct SegmentRequest {
  std::string request_id;
  std::string image;  // base64 PNG
  std::vector<Point> points;

  nlohmann::json ToJson() const;
  static SegmentRequest FromJson(const nlohmann::json& j);
  bool operator==(const SegmentRequest&) const = default;
};

struct ErrorReply {
  std::string code;
  std::string message;
  nlohmann::json ToJson() const;
  static ErrorReply FromJson(const nlohmann::json& j);
};

std::string EncodeImage(const RgbImage& image);
RgbImage DecodeImagePayload(const std::string& b64);

std::string ParseCompletion(const nlohmann::json& j);
std::vector<float> ParseEmbedding(const nlohmann::json& j);
std::vector<BinaryMask> ParseMasks(const nlohmann::json& j);

nlohmann::json CompletionToJson(const std::string& completion);
nlohmann::json EmbeddingToJson(const std::vector<float>& v);
nlohmann::json MasksToJson(const std::vector<BinaryMask>& masks);

}  // namespace refseg::wire

#endif  // REFSEG_WIRE_H_
