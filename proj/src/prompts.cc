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

#include "refseg/prompts.h"

#include "refseg/errors.h"
#include "refseg/hashing.h"

namespace refseg {
namespace assets {
extern const std::string_view kRefTemplate;
extern const std::string_view kCanTemplate;
extern const std::string_view kT2tTemplate;
extern const std::string_view kT2iTemplate;
}  // namespace assets

namespace {

std::string_view CandidateViewText(PromptKind kind) {
  switch (kind) {
    case PromptKind::kMaskCropped:
      return "A cropped masked view showing detailed visual properties";
    case PromptKind::kBbox:
      return "A full view with a bounding box showing location and context";
    case PromptKind::kOriginal:
      return "The original full view of the scene without any highlighting";
    case PromptKind::kContour:
      return "A full view with a red contour outlining the region showing "
             "location and context";
    case PromptKind::kBlur:
      return "A full view with a blurred background around the sharp region "
             "showing location and context";
  }
  return "";
}

std::string_view ComparisonViewText(PromptKind kind) {
  switch (kind) {
    case PromptKind::kMaskCropped:
      return "A cropped mask image showing a region in non-black color";
    case PromptKind::kBbox:
      return "An image with a green bounding box surrounding the region "
             "showing the full scene and spatial relationships";
    case PromptKind::kOriginal:
      return "The original image showing the full scene";
    case PromptKind::kContour:
      return "An image with a red contour outlining the region showing the "
             "full scene and spatial relationships";
    case PromptKind::kBlur:
      return "An image with a blurred background around the sharp region "
             "showing the full scene and spatial relationships";
  }
  return "";
}

std::string_view CountWord(size_t n) {
  static constexpr std::string_view kWords[] = {"zero", "one",  "two",
                                                "three", "four", "five"};
  return n < std::size(kWords) ? kWords[n] : "several";
}

std::string NumberedList(const std::vector<PromptKind>& kinds,
                         std::string_view (*text)(PromptKind)) {
  std::string out;
  for (size_t i = 0; i < kinds.size(); ++i) {
    if (i) out += "; ";
    out += std::to_string(i + 1) + ") " + std::string(text(kinds[i]));
  }
  return out + ".";
}

void CheckKinds(const std::vector<PromptKind>& kinds) {
  if (kinds.empty()) throw ConfigError("no visual prompt kinds configured");
}

}  // namespace

std::string_view TemplateName(TemplateId id) {
  switch (id) {
    case TemplateId::kRef:
      return "ref";
    case TemplateId::kCan:
      return "can";
    case TemplateId::kT2t:
      return "t2t";
    case TemplateId::kT2i:
      return "t2i";
  }
  return "unknown";
}

PromptTemplate::PromptTemplate(TemplateId id, std::string body)
    : id_(id), body_(std::move(body)) {
  version_ = std::string(TemplateName(id)) + "-" + Sha256Hex(body_).substr(0, 12);
}

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> out;
  size_t pos = 0;
  while ((pos = body_.find("${", pos)) != std::string::npos) {
    const size_t end = body_.find('}', pos);
    if (end == std::string::npos) break;
    out.push_back(body_.substr(pos + 2, end - pos - 2));
    pos = end + 1;
  }
  return out;
}

std::string PromptTemplate::Render(
    const std::map<std::string, std::string>& bindings) const {
  std::string out;
  out.reserve(body_.size() + 256);
  size_t pos = 0;
  while (true) {
    const size_t open = body_.find("${", pos);
    if (open == std::string::npos) {
      out.append(body_, pos, std::string::npos);
      break;
    }
    const size_t close = body_.find('}', open);
    if (close == std::string::npos) {
      out.append(body_, pos, std::string::npos);
      break;
    }
    out.append(body_, pos, open - pos);
    const std::string name = body_.substr(open + 2, close - open - 2);
    auto it = bindings.find(name);
    if (it == bindings.end()) {
      throw ConfigError("template " + version_ + " placeholder '" + name +
                        "' is unbound");
    }
    out += it->second;
    pos = close + 1;
  }
  return out;
}

const PromptTemplate& GetTemplate(TemplateId id) {
  static const PromptTemplate kRef(TemplateId::kRef, std::string(assets::kRefTemplate));
  static const PromptTemplate kCan(TemplateId::kCan, std::string(assets::kCanTemplate));
  static const PromptTemplate kT2t(TemplateId::kT2t, std::string(assets::kT2tTemplate));
  static const PromptTemplate kT2i(TemplateId::kT2i, std::string(assets::kT2iTemplate));
  switch (id) {
    case TemplateId::kRef:
      return kRef;
    case TemplateId::kCan:
      return kCan;
    case TemplateId::kT2t:
      return kT2t;
    case TemplateId::kT2i:
      return kT2i;
  }
  throw ConfigError("unknown template id");
}

std::string CandidateViewsPreamble(const std::vector<PromptKind>& kinds) {
  CheckKinds(kinds);
  if (kinds.size() == 1) {
    std::string view(CandidateViewText(kinds[0]));
    // "A cropped ..." reads "a cropped ..." mid-sentence.
    view[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(view[0])));
    return "You are presented with " + view + ";";
  }
  return "You are presented with " + std::string(CountWord(kinds.size())) +
         " complementary views of the same region: " +
         NumberedList(kinds, CandidateViewText);
}

std::string ComparisonViewsPreamble(const std::vector<PromptKind>& kinds) {
  CheckKinds(kinds);
  const std::string noun = kinds.size() == 1 ? " image" : " images";
  return "You have " + std::string(CountWord(kinds.size())) + noun +
         " for context: " + NumberedList(kinds, ComparisonViewText);
}

std::string RenderReferencePrompt(const std::string& expression) {
  return GetTemplate(TemplateId::kRef).Render({{"expression", expression}});
}

std::string RenderCandidatePrompt(const std::vector<PromptKind>& kinds) {
  return GetTemplate(TemplateId::kCan)
      .Render({{"views", CandidateViewsPreamble(kinds)}});
}

std::string RenderT2tPrompt(const std::string& expression,
                            const std::string& reference,
                            const std::string& candidate) {
  return GetTemplate(TemplateId::kT2t)
      .Render({{"expression", expression},
               {"reference", reference},
               {"candidate", candidate}});
}

std::string RenderT2iPrompt(const std::string& expression,
                            const std::string& reference,
                            const std::vector<PromptKind>& kinds) {
  return GetTemplate(TemplateId::kT2i)
      .Render({{"expression", expression},
               {"reference", reference},
               {"views", ComparisonViewsPreamble(kinds)}});
}

}  // namespace refseg
