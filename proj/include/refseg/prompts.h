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

#ifndef REFSEG_PROMPTS_H_
#define REFSEG_PROMPTS_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "refseg/visual_prompts.h"

namespace refseg {

enum class TemplateId { kRef, kCan, kT2t, kT2i };

std::string_view TemplateName(TemplateId id);

// A text prompt with ${name} placeholders. Bodies ship as text assets under
// assets/prompts/ and are compiled into the library.
class PromptTemplate {
 public:
  PromptTemplate(TemplateId id, std::string body);

  TemplateId id() const { return id_; }
  const std::string& body() const { return body_; }
  // "<name>-<first 12 hex digits of sha256(body)>".
  const std::string& version() const { return version_; }
  std::vector<std::string> placeholders() const;

  // Substitutes every placeholder. Throws ConfigError when a placeholder
  // has no binding. Bound values are inserted literally.
  std::string Render(const std::map<std::string, std::string>& bindings) const;

 private:
  TemplateId id_;
  std::string body_;
  std::string version_;
};

const PromptTemplate& GetTemplate(TemplateId id);

// View-description preambles bound to ${views}. For the default
// {mask_cropped, bbox} they reproduce the shipped wording exactly.
std::string CandidateViewsPreamble(const std::vector<PromptKind>& kinds);
std::string ComparisonViewsPreamble(const std::vector<PromptKind>& kinds);

std::string RenderReferencePrompt(const std::string& expression);
std::string RenderCandidatePrompt(const std::vector<PromptKind>& kinds);
std::string RenderT2tPrompt(const std::string& expression,
                            const std::string& reference,
                            const std::string& candidate);
std::string RenderT2iPrompt(const std::string& expression,
                            const std::string& reference,
                            const std::vector<PromptKind>& kinds);

}  // namespace refseg

#endif  // REFSEG_PROMPTS_H_
