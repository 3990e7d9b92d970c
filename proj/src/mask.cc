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

#include "refseg/mask.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "refseg/errors.h"

namespace refseg {
namespace {

void CheckGrid(int width, int height) {
  if (width < 1 || height < 1) {
    std::ostringstream os;
    os << "mask grid must be at least 1x1, got " << width << "x" << height;
    throw InvalidInputError(os.str());
  }
}

void CheckSameGrid(const BinaryMask& a, const BinaryMask& b) {
  if (!a.SameGrid(b)) {
    std::ostringstream os;
    os << "mask grid mismatch: " << a.width() << "x" << a.height() << " vs "
       << b.width() << "x" << b.height();
    throw DimensionError(os.str());
  }
}

// Sort and merge overlapping or touching runs.
std::vector<Run> Canonicalize(std::vector<Run> runs) {
  std::erase_if(runs, [](const Run& r) { return r.length == 0; });
  std::sort(runs.begin(), runs.end(),
            [](const Run& a, const Run& b) { return a.start < b.start; });
  std::vector<Run> out;
  out.reserve(runs.size());
  for (const Run& r : runs) {
    if (!out.empty() && r.start <= out.back().start + out.back().length) {
      Run& last = out.back();
      last.length = std::max(last.start + last.length, r.start + r.length) -
                    last.start;
    } else {
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
  CheckGrid(width, height);
}

BinaryMask BinaryMask::FromRuns(int width, int height, std::vector<Run> runs) {
  BinaryMask mask(width, height);
  const int64_t total = mask.pixel_count();
  for (const Run& r : runs) {
    if (r.start < 0 || r.length < 0 || r.start + r.length > total) {
      std::ostringstream os;
      os << "run (" << r.start << "," << r.length << ") outside " << width
         << "x" << height << " grid";
      throw InvalidInputError(os.str());
    }
  }
  mask.runs_ = Canonicalize(std::move(runs));
  return mask;
}

BinaryMask BinaryMask::FromCounts(int width, int height,
                                  std::span<const int64_t> counts) {
  BinaryMask mask(width, height);
  const int64_t total = mask.pixel_count();
  std::vector<Run> runs;
  int64_t offset = 0;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) throw ParseError("negative RLE count");
    if (offset + counts[i] > total) {
      std::ostringstream os;
      os << "RLE counts exceed " << width << "x" << height << " grid";
      throw ParseError(os.str());
    }
    if (i % 2 == 1 && counts[i] > 0) runs.push_back({offset, counts[i]});
    offset += counts[i];
  }
  mask.runs_ = Canonicalize(std::move(runs));
  return mask;
}

BinaryMask BinaryMask::FromDense(int width, int height,
                                 std::span<const uint8_t> pixels) {
  BinaryMask mask(width, height);
  if (static_cast<int64_t>(pixels.size()) != mask.pixel_count()) {
    throw DimensionError("dense buffer size does not match grid");
  }
  const int64_t total = mask.pixel_count();
  int64_t i = 0;
  while (i < total) {
    if (pixels[i] == 0) {
      ++i;
      continue;
    }
    int64_t j = i;
    while (j < total && pixels[j] != 0) ++j;
    mask.runs_.push_back({i, j - i});
    i = j;
  }
  return mask;
}

BinaryMask BinaryMask::Full(int width, int height) {
  BinaryMask mask(width, height);
  mask.runs_.push_back({0, mask.pixel_count()});
  return mask;
}

BinaryMask BinaryMask::FromBox(int width, int height, const BoundingBox& box) {
  BinaryMask mask(width, height);
  if (box.x_min < 0 || box.y_min < 0 || box.x_max >= width ||
      box.y_max >= height || box.x_min > box.x_max || box.y_min > box.y_max) {
    throw InvalidInputError("box outside grid");
  }
  for (int y = box.y_min; y <= box.y_max; ++y) {
    mask.runs_.push_back(
        {static_cast<int64_t>(y) * width + box.x_min, box.width()});
  }
  mask.runs_ = Canonicalize(std::move(mask.runs_));
  return mask;
}

bool BinaryMask::Contains(int x, int y) const {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return false;
  const int64_t idx = static_cast<int64_t>(y) * width_ + x;
  auto it = std::upper_bound(
      runs_.begin(), runs_.end(), idx,
      [](int64_t v, const Run& r) { return v < r.start; });
  if (it == runs_.begin()) return false;
  --it;
  return idx < it->start + it->length;
}

std::vector<uint8_t> BinaryMask::ToDense() const {
  std::vector<uint8_t> out(static_cast<size_t>(pixel_count()), 0);
  for (const Run& r : runs_) {
    std::fill_n(out.begin() + r.start, r.length, uint8_t{1});
  }
  return out;
}

std::vector<int64_t> BinaryMask::ToCounts() const {
  std::vector<int64_t> counts;
  counts.reserve(runs_.size() * 2 + 1);
  int64_t offset = 0;
  for (const Run& r : runs_) {
    counts.push_back(r.start - offset);
    counts.push_back(r.length);
    offset = r.start + r.length;
  }
  if (offset < pixel_count() || counts.empty()) {
    counts.push_back(pixel_count() - offset);
  }
  return counts;
}

int64_t Area(const BinaryMask& mask) {
  int64_t sum = 0;
  for (const Run& r : mask.runs()) sum += r.length;
  return sum;
}

int64_t IntersectionArea(const BinaryMask& a, const BinaryMask& b) {
  CheckSameGrid(a, b);
  const auto& ra = a.runs();
  const auto& rb = b.runs();
  int64_t inter = 0;
  size_t i = 0, j = 0;
  while (i < ra.size() && j < rb.size()) {
    const int64_t a_end = ra[i].start + ra[i].length;
    const int64_t b_end = rb[j].start + rb[j].length;
    const int64_t lo = std::max(ra[i].start, rb[j].start);
    const int64_t hi = std::min(a_end, b_end);
    if (hi > lo) inter += hi - lo;
    if (a_end < b_end) {
      ++i;
    } else {
      ++j;
    }
  }
  return inter;
}

double Iou(const BinaryMask& a, const BinaryMask& b) {
  const int64_t inter = IntersectionArea(a, b);
  const int64_t uni = Area(a) + Area(b) - inter;
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

BinaryMask Union(std::span<const BinaryMask> masks) {
  if (masks.empty()) throw InvalidInputError("union of an empty mask list");
  std::vector<Run> all;
  for (const BinaryMask& m : masks) {
    CheckSameGrid(masks.front(), m);
    all.insert(all.end(), m.runs().begin(), m.runs().end());
  }
  return BinaryMask::FromRuns(masks.front().width(), masks.front().height(),
                              std::move(all));
}

bool IsSubset(const BinaryMask& inner, const BinaryMask& outer) {
  return IntersectionArea(inner, outer) == Area(inner);
}

BoundingBox GetBoundingBox(const BinaryMask& mask) {
  if (mask.empty()) throw InvalidInputError("bounding box of an empty mask");
  const int64_t w = mask.width();
  BoundingBox box{mask.width(), mask.height(), -1, -1};
  for (const Run& r : mask.runs()) {
    const int64_t first = r.start;
    const int64_t last = r.start + r.length - 1;
    const int y0 = static_cast<int>(first / w);
    const int y1 = static_cast<int>(last / w);
    int x0 = static_cast<int>(first % w);
    int x1 = static_cast<int>(last % w);
    if (y1 > y0) {
      // The run wraps a row boundary: it reaches the last column of row y0
      // and the first column of row y1.
      x0 = 0;
      x1 = mask.width() - 1;
    }
    box.x_min = std::min(box.x_min, x0);
    box.x_max = std::max(box.x_max, x1);
    box.y_min = std::min(box.y_min, y0);
    box.y_max = std::max(box.y_max, y1);
  }
  return box;
}

nlohmann::json MaskToJson(const BinaryMask& mask) {
  return nlohmann::json{{"width", mask.width()},
                        {"height", mask.height()},
                        {"counts", mask.ToCounts()}};
}

BinaryMask MaskFromJson(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("width") || !j.contains("height") ||
      !j.contains("counts")) {
    throw ParseError("mask object needs width, height and counts");
  }
  try {
    const int w = j.at("width").get<int>();
    const int h = j.at("height").get<int>();
    const auto counts = j.at("counts").get<std::vector<int64_t>>();
    return BinaryMask::FromCounts(w, h, counts);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad mask object: ") + e.what());
  } catch (const InvalidInputError& e) {
    throw ParseError(e.what());
  }
}

void SaveMask(const BinaryMask& mask, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write " + path);
  out << MaskToJson(mask).dump() << "\n";
}

BinaryMask LoadMask(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot read " + path);
  try {
    return MaskFromJson(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

MaskProposal MaskProposal::Make(int id, BinaryMask mask) {
  if (mask.empty()) throw InvalidInputError("proposal mask is empty");
  MaskProposal p;
  p.id = id;
  p.area = Area(mask);
  p.bbox = GetBoundingBox(mask);
  p.mask = std::move(mask);
  return p;
}

MaskProposalSet MaskProposalSet::Create(std::string image_id, int width,
                                        int height,
                                        std::vector<BinaryMask> masks) {
  CheckGrid(width, height);
  MaskProposalSet set;
  set.image_id = std::move(image_id);
  set.width = width;
  set.height = height;
  set.proposals.reserve(masks.size());
  for (auto& m : masks) {
    if (m.width() != width || m.height() != height) {
      std::ostringstream os;
      os << "proposal " << set.proposals.size() << " is " << m.width() << "x"
         << m.height() << ", expected " << width << "x" << height;
      throw DimensionError(os.str());
    }
    set.proposals.push_back(MaskProposal::Make(
        static_cast<int>(set.proposals.size()), std::move(m)));
  }
  return set;
}

const MaskProposal& MaskProposalSet::at(int id) const {
  if (id < 0 || id >= static_cast<int>(proposals.size())) {
    throw InvalidInputError("proposal id out of range");
  }
  return proposals[id];
}

std::vector<BinaryMask> MaskProposalSet::masks() const {
  std::vector<BinaryMask> out;
  out.reserve(proposals.size());
  for (const auto& p : proposals) out.push_back(p.mask);
  return out;
}

MaskProposalSet FilterSmall(const MaskProposalSet& set, double min_fraction) {
  if (!(min_fraction >= 0.0 && min_fraction < 1.0)) {
    throw InvalidInputError("min_fraction must lie in [0, 1)");
  }
  const double floor_area =
      min_fraction * static_cast<double>(set.width) * set.height;
  MaskProposalSet out{set.image_id, set.width, set.height, {}};
  for (const auto& p : set.proposals) {
    if (static_cast<double>(p.area) >= floor_area) {
      out.proposals.push_back(p);
      out.proposals.back().id = static_cast<int>(out.proposals.size()) - 1;
    }
  }
  return out;
}

MaskProposalSet Dedup(const MaskProposalSet& set, double dup_iou) {
  if (!(dup_iou > 0.0 && dup_iou <= 1.0)) {
    throw InvalidInputError("dup_iou must lie in (0, 1]");
  }
  std::vector<size_t> order(set.proposals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const auto& pa = set.proposals[a];
    const auto& pb = set.proposals[b];
    if (pa.area != pb.area) return pa.area > pb.area;
    return pa.id < pb.id;
  });
  MaskProposalSet out{set.image_id, set.width, set.height, {}};
  for (size_t idx : order) {
    const auto& cand = set.proposals[idx];
    bool duplicate = false;
    for (const auto& kept : out.proposals) {
      if (Iou(cand.mask, kept.mask) >= dup_iou) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      out.proposals.push_back(cand);
      out.proposals.back().id = static_cast<int>(out.proposals.size()) - 1;
    }
  }
  return out;
}

}  // namespace refseg
