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

#ifndef REFSEG_VISUAL_PROMPTS_H_
#define REFSEG_VISUAL_PROMPTS_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "refseg/image.h"
#include "refseg/mask.h"

namespace refseg {

// The five region renderings that can be shown to the language model.
enum class PromptKind { kOriginal, kMaskCropped, kBbox, kContour, kBlur };

std::string_view KindName(PromptKind kind);
// Accepts the canonical names plus "image" and "mask" as aliases for
// original and mask_cropped. Throws ConfigError for anything else.
PromptKind ParseKind(std::string_view name);
// Comma-separated list; rejects empty lists and repeated kinds.
std::vector<PromptKind> ParseKinds(std::string_view csv);
std::string JoinKinds(const std::vector<PromptKind>& kinds);
const std::vector<PromptKind>& DefaultKinds();

// max(1, round(0.004 * max(W, H))): 4 px on a 1024 px image.
int DefaultLineWidth(int width, int height);
// round(0.02 * max(W, H)).
int DefaultBlurRadius(int width, int height);

struct RenderOptions {
  // Zero or negative means "derive from the image size".
  int bbox_line_width = 0;
  int contour_line_width = 0;
  int blur_radius = -1;
  Rgb bbox_color = kGreen;
  Rgb contour_color = kRed;
};

// Pixels inside the mask copied verbatim, everything else (0,0,0).
RgbImage RenderMaskCropped(const RgbImage& image, const BinaryMask& mask);
// Green band of `line_width` pixels drawn inside the mask's tight box.
RgbImage RenderBbox(const RgbImage& image, const BinaryMask& mask,
                    int line_width, Rgb color = kGreen);
// Recolors set pixels within `line_width` 4-connected steps of background
// (out-of-image counts as background). line_width 1 gives exactly the set
// pixels that have an unset or out-of-bounds 4-neighbour.
RgbImage RenderContour(const RgbImage& image, const BinaryMask& mask,
                       Rgb color, int line_width);
// Mask pixels verbatim; the rest taken from BoxBlur(image, radius).
RgbImage RenderBlur(const RgbImage& image, const BinaryMask& mask, int radius);
// Three separable box-filter passes with clamp-to-edge sampling and
// round-half-up integer division. radius 0 returns the input.
RgbImage BoxBlur(const RgbImage& image, int radius);
// 50% blend of `color` over mask pixels; used for result previews.
RgbImage RenderOverlay(const RgbImage& image, const BinaryMask& mask,
                       Rgb color = kRed);

struct VisualPrompt {
  PromptKind kind;
  RgbImage image;
};

struct VisualPromptSet {
  std::vector<VisualPrompt> variants;

  const RgbImage* Find(PromptKind kind) const;
  std::vector<PromptKind> kinds() const;
  size_t size() const { return variants.size(); }
};

RgbImage RenderKind(const RgbImage& image, const BinaryMask& mask,
                    PromptKind kind, const RenderOptions& options = {});
// Renders `kinds` in order. Throws InvalidInputError on an empty or
// repeated kind list.
VisualPromptSet RenderPromptSet(const RgbImage& image, const BinaryMask& mask,
                                const std::vector<PromptKind>& kinds,
                                const RenderOptions& options = {});

}  // namespace refseg

#endif  // REFSEG_VISUAL_PROMPTS_H_
