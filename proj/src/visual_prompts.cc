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

#include "refseg/visual_prompts.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "refseg/errors.h"

namespace refseg {
namespace {

void CheckMaskMatchesImage(const RgbImage& image, const BinaryMask& mask) {
  if (mask.width() != image.width() || mask.height() != image.height()) {
    std::ostringstream os;
    os << "mask " << mask.width() << "x" << mask.height()
       << " does not match image " << image.width() << "x" << image.height();
    throw DimensionError(os.str());
  }
}

void CheckNonEmpty(const BinaryMask& mask) {
  if (mask.empty()) throw InvalidInputError("visual prompt of an empty mask");
}

// One horizontal or vertical box pass over a single channel plane.
void BoxPass(const std::vector<uint8_t>& src, std::vector<uint8_t>& dst,
             int width, int height, int radius, bool horizontal) {
  const int window = 2 * radius + 1;
  const int lines = horizontal ? height : width;
  const int len = horizontal ? width : height;
  auto index = [&](int line, int pos) -> size_t {
    return horizontal ? static_cast<size_t>(line) * width + pos
                      : static_cast<size_t>(pos) * width + line;
  };
  for (int line = 0; line < lines; ++line) {
    auto sample = [&](int pos) {
      return static_cast<int64_t>(src[index(line, std::clamp(pos, 0, len - 1))]);
    };
    int64_t sum = 0;
    for (int k = -radius; k <= radius; ++k) sum += sample(k);
    for (int pos = 0; pos < len; ++pos) {
      dst[index(line, pos)] =
          static_cast<uint8_t>((sum + window / 2) / window);
      sum += sample(pos + radius + 1) - sample(pos - radius);
    }
  }
}

}  // namespace

std::string_view KindName(PromptKind kind) {
  switch (kind) {
    case PromptKind::kOriginal:
      return "original";
    case PromptKind::kMaskCropped:
      return "mask_cropped";
    case PromptKind::kBbox:
      return "bbox";
    case PromptKind::kContour:
      return "contour";
    case PromptKind::kBlur:
      return "blur";
  }
  return "unknown";
}

PromptKind ParseKind(std::string_view name) {
  if (name == "original" || name == "image") return PromptKind::kOriginal;
  if (name == "mask_cropped" || name == "mask") return PromptKind::kMaskCropped;
  if (name == "bbox") return PromptKind::kBbox;
  if (name == "contour") return PromptKind::kContour;
  if (name == "blur") return PromptKind::kBlur;
  throw ConfigError("unknown visual prompt kind '" + std::string(name) + "'");
}

std::vector<PromptKind> ParseKinds(std::string_view csv) {
  std::vector<PromptKind> kinds;
  size_t pos = 0;
  while (pos <= csv.size()) {
    size_t comma = csv.find(',', pos);
    if (comma == std::string_view::npos) comma = csv.size();
    std::string_view item = csv.substr(pos, comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      const PromptKind k = ParseKind(item);
      if (std::find(kinds.begin(), kinds.end(), k) != kinds.end()) {
        throw ConfigError("visual prompt kind listed twice: " + std::string(item));
      }
      kinds.push_back(k);
    }
    pos = comma + 1;
  }
  if (kinds.empty()) throw ConfigError("empty visual prompt kind list");
  return kinds;
}

std::string JoinKinds(const std::vector<PromptKind>& kinds) {
  std::string out;
  for (size_t i = 0; i < kinds.size(); ++i) {
    if (i) out += ",";
    out += KindName(kinds[i]);
  }
  return out;
}

const std::vector<PromptKind>& DefaultKinds() {
  static const std::vector<PromptKind> kDefault = {PromptKind::kMaskCropped,
                                                   PromptKind::kBbox};
  return kDefault;
}

int DefaultLineWidth(int width, int height) {
  return std::max(1, static_cast<int>(std::lround(0.004 * std::max(width, height))));
}

int DefaultBlurRadius(int width, int height) {
  return static_cast<int>(std::lround(0.02 * std::max(width, height)));
}

RgbImage RenderMaskCropped(const RgbImage& image, const BinaryMask& mask) {
  CheckMaskMatchesImage(image, mask);
  CheckNonEmpty(mask);
  RgbImage out(image.width(), image.height(), kBlack);
  const auto& src = image.pixels();
  auto& dst = out.mutable_pixels();
  for (const Run& r : mask.runs()) {
    std::copy_n(src.begin() + r.start * 3, r.length * 3, dst.begin() + r.start * 3);
  }
  return out;
}

RgbImage RenderBbox(const RgbImage& image, const BinaryMask& mask,
                    int line_width, Rgb color) {
  CheckMaskMatchesImage(image, mask);
  CheckNonEmpty(mask);
  if (line_width < 1) throw InvalidInputError("line_width must be >= 1");
  const BoundingBox box = GetBoundingBox(mask);
  RgbImage out = image;
  for (int y = box.y_min; y <= box.y_max; ++y) {
    const bool edge_row =
        y < box.y_min + line_width || y > box.y_max - line_width;
    for (int x = box.x_min; x <= box.x_max; ++x) {
      if (edge_row || x < box.x_min + line_width || x > box.x_max - line_width) {
        out.set(x, y, color);
      }
    }
  }
  return out;
}

RgbImage RenderContour(const RgbImage& image, const BinaryMask& mask,
                       Rgb color, int line_width) {
  CheckMaskMatchesImage(image, mask);
  CheckNonEmpty(mask);
  if (line_width < 1) throw InvalidInputError("line_width must be >= 1");
  const int w = image.width();
  const int h = image.height();
  const std::vector<uint8_t> dense = mask.ToDense();

  // Multi-source BFS from every background pixel gives the 4-connected step
  // distance; the image border acts as an extra source one step outside.
  constexpr int kUnset = std::numeric_limits<int>::max();
  std::vector<int> dist(dense.size(), kUnset);
  std::deque<size_t> queue;
  for (size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] == 0) {
      dist[i] = 0;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const size_t i = queue.front();
    queue.pop_front();
    const int x = static_cast<int>(i % w);
    const int y = static_cast<int>(i / w);
    const int next = dist[i] + 1;
    if (next > line_width) continue;
    auto relax = [&](int nx, int ny) {
      const size_t j = static_cast<size_t>(ny) * w + nx;
      if (dist[j] > next) {
        dist[j] = next;
        queue.push_back(j);
      }
    };
    if (x > 0) relax(x - 1, y);
    if (x + 1 < w) relax(x + 1, y);
    if (y > 0) relax(x, y - 1);
    if (y + 1 < h) relax(x, y + 1);
  }

  RgbImage out = image;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * w + x;
      if (dense[i] == 0) continue;
      const int border = std::min({x + 1, y + 1, w - x, h - y});
      if (std::min(dist[i], border) <= line_width) out.set(x, y, color);
    }
  }
  return out;
}

RgbImage BoxBlur(const RgbImage& image, int radius) {
  if (radius < 0) throw InvalidInputError("blur radius must be >= 0");
  if (radius == 0) return image;
  const int w = image.width();
  const int h = image.height();
  const size_t n = static_cast<size_t>(w) * h;
  RgbImage out = image;
  std::vector<uint8_t> plane(n), scratch(n);
  for (int c = 0; c < 3; ++c) {
    for (size_t i = 0; i < n; ++i) plane[i] = image.pixels()[3 * i + c];
    for (int pass = 0; pass < 3; ++pass) {
      BoxPass(plane, scratch, w, h, radius, /*horizontal=*/true);
      BoxPass(scratch, plane, w, h, radius, /*horizontal=*/false);
    }
    for (size_t i = 0; i < n; ++i) out.mutable_pixels()[3 * i + c] = plane[i];
  }
  return out;
}

RgbImage RenderBlur(const RgbImage& image, const BinaryMask& mask, int radius) {
  CheckMaskMatchesImage(image, mask);
  RgbImage out = BoxBlur(image, radius);
  const auto& src = image.pixels();
  auto& dst = out.mutable_pixels();
  for (const Run& r : mask.runs()) {
    std::copy_n(src.begin() + r.start * 3, r.length * 3, dst.begin() + r.start * 3);
  }
  return out;
}

RgbImage RenderOverlay(const RgbImage& image, const BinaryMask& mask, Rgb color) {
  CheckMaskMatchesImage(image, mask);
  RgbImage out = image;
  auto& px = out.mutable_pixels();
  const uint8_t tint[3] = {color.r, color.g, color.b};
  for (const Run& r : mask.runs()) {
    for (int64_t i = r.start; i < r.start + r.length; ++i) {
      for (int c = 0; c < 3; ++c) {
        px[3 * i + c] = static_cast<uint8_t>((px[3 * i + c] + tint[c] + 1) / 2);
      }
    }
  }
  return out;
}

const RgbImage* VisualPromptSet::Find(PromptKind kind) const {
  for (const auto& v : variants) {
    if (v.kind == kind) return &v.image;
  }
  return nullptr;
}

std::vector<PromptKind> VisualPromptSet::kinds() const {
  std::vector<PromptKind> out;
  out.reserve(variants.size());
  for (const auto& v : variants) out.push_back(v.kind);
  return out;
}

RgbImage RenderKind(const RgbImage& image, const BinaryMask& mask,
                    PromptKind kind, const RenderOptions& options) {
  const int w = image.width();
  const int h = image.height();
  switch (kind) {
    case PromptKind::kOriginal:
      CheckMaskMatchesImage(image, mask);
      return image;
    case PromptKind::kMaskCropped:
      return RenderMaskCropped(image, mask);
    case PromptKind::kBbox:
      return RenderBbox(image, mask,
                        options.bbox_line_width > 0 ? options.bbox_line_width
                                                    : DefaultLineWidth(w, h),
                        options.bbox_color);
    case PromptKind::kContour:
      return RenderContour(image, mask, options.contour_color,
                           options.contour_line_width > 0
                               ? options.contour_line_width
                               : DefaultLineWidth(w, h));
    case PromptKind::kBlur:
      return RenderBlur(image, mask,
                        options.blur_radius >= 0 ? options.blur_radius
                                                 : DefaultBlurRadius(w, h));
  }
  throw InvalidInputError("unknown prompt kind");
}

VisualPromptSet RenderPromptSet(const RgbImage& image, const BinaryMask& mask,
                                const std::vector<PromptKind>& kinds,
                                const RenderOptions& options) {
  if (kinds.empty()) throw InvalidInputError("no visual prompt kinds requested");
  VisualPromptSet set;
  for (size_t i = 0; i < kinds.size(); ++i) {
    if (std::find(kinds.begin(), kinds.begin() + i, kinds[i]) !=
        kinds.begin() + i) {
      throw InvalidInputError("visual prompt kinds must be unique");
    }
    set.variants.push_back({kinds[i], RenderKind(image, mask, kinds[i], options)});
  }
  return set;
}

}  // namespace refseg
