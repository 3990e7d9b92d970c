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

#include "refseg/wire.h"

#include "refseg/errors.h"
#include "refseg/hashing.h"

namespace refseg::wire {
namespace {

using nlohmann::json;

template <typename T>
T Field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw ParseError(std::string("wire message missing field '") + name + "'");
  }
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("wire field '") + name + "': " + e.what());
  }
}

void CheckVersion(const json& j) {
  if (j.contains("schema_version") &&
      Field<int>(j, "schema_version") != kSchemaVersion) {
    throw ParseError("unsupported wire schema version");
  }
}

}  // namespace

json CompleteRequest::ToJson() const {
  return {{"schema_version", kSchemaVersion},
          {"request_id", request_id},
          {"prompt", prompt},
          {"images", images},
          {"temperature", temperature}};
}

CompleteRequest CompleteRequest::FromJson(const json& j) {
  CheckVersion(j);
  CompleteRequest r;
  r.request_id = Field<std::string>(j, "request_id");
  r.prompt = Field<std::string>(j, "prompt");
  r.images = Field<std::vector<std::string>>(j, "images");
  if (j.contains("temperature")) r.temperature = Field<double>(j, "temperature");
  return r;
}

json EmbedTextRequest::ToJson() const {
  return {{"schema_version", kSchemaVersion},
          {"request_id", request_id},
          {"text", text}};
}

EmbedTextRequest EmbedTextRequest::FromJson(const json& j) {
  CheckVersion(j);
  return {Field<std::string>(j, "request_id"), Field<std::string>(j, "text")};
}

json EmbedImageRequest::ToJson() const {
  return {{"schema_version", kSchemaVersion},
          {"request_id", request_id},
          {"image", image}};
}

EmbedImageRequest EmbedImageRequest::FromJson(const json& j) {
  CheckVersion(j);
  return {Field<std::string>(j, "request_id"), Field<std::string>(j, "image")};
}

json SegmentRequest::ToJson() const {
  json pts = json::array();
  for (const Point& p : points) pts.push_back({p.x, p.y});
  return {{"schema_version", kSchemaVersion},
          {"request_id", request_id},
          {"image", image},
          {"points", pts}};
}

SegmentRequest SegmentRequest::FromJson(const json& j) {
  CheckVersion(j);
  SegmentRequest r;
  r.request_id = Field<std::string>(j, "request_id");
  r.image = Field<std::string>(j, "image");
  for (const auto& p : Field<std::vector<std::vector<int>>>(j, "points")) {
    if (p.size() != 2) throw ParseError("segment point must be [x, y]");
    r.points.push_back({p[0], p[1]});
  }
  return r;
}

json ErrorReply::ToJson() const { return {{"code", code}, {"message", message}}; }

ErrorReply ErrorReply::FromJson(const json& j) {
  ErrorReply e;
  if (j.is_object()) {
    if (j.contains("code")) e.code = j["code"].is_string() ? j["code"].get<std::string>() : j["code"].dump();
    if (j.contains("message") && j["message"].is_string()) e.message = j["message"];
  }
  return e;
}

std::string EncodeImage(const RgbImage& image) {
  return Base64Encode(EncodePng(image));
}

RgbImage DecodeImagePayload(const std::string& b64) {
  return DecodeImage(Base64Decode(b64));
}

std::string ParseCompletion(const json& j) {
  return Field<std::string>(j, "completion");
}

std::vector<float> ParseEmbedding(const json& j) {
  auto v = Field<std::vector<float>>(j, "embedding");
  if (v.empty()) throw ParseError("empty embedding");
  return v;
}

std::vector<BinaryMask> ParseMasks(const json& j) {
  const json masks = Field<json>(j, "masks");
  if (!masks.is_array()) throw ParseError("'masks' must be an array");
  std::vector<BinaryMask> out;
  out.reserve(masks.size());
  for (const auto& m : masks) out.push_back(MaskFromJson(m));
  return out;
}

json CompletionToJson(const std::string& completion) {
  return {{"completion", completion}};
}

json EmbeddingToJson(const std::vector<float>& v) { return {{"embedding", v}}; }

json MasksToJson(const std::vector<BinaryMask>& masks) {
  json arr = json::array();
  for (const auto& m : masks) arr.push_back(MaskToJson(m));
  return {{"masks", arr}};
}

}  // namespace refseg::wire
