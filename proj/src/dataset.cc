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

#include "refseg/dataset.h"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "refseg/errors.h"
#include "refseg/synthetic.h"

namespace refseg {
namespace fs = std::filesystem;

namespace {

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json ParseText(const std::string& text, const std::string& path) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string Context(const std::string& path, size_t index,
                    const std::vector<int>& lines) {
  std::string s = path + ": sample " + std::to_string(index);
  if (index < lines.size()) s += " (line " + std::to_string(lines[index]) + ")";
  return s;
}

// Rethrows anything raised while reading one sample with its location.
template <typename Fn>
auto WithContext(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const DimensionError& e) {
    throw DimensionError(where + ": " + e.what());
  } catch (const Error& e) {
    throw ParseError(where + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
}

void CheckGrid(const std::optional<BinaryMask>& gt, const nlohmann::json& j) {
  if (!gt || !j.contains("width") || !j.contains("height")) return;
  if (gt->width() != j["width"].get<int>() || gt->height() != j["height"].get<int>()) {
    throw DimensionError("gt mask " + std::to_string(gt->width()) + "x" +
                         std::to_string(gt->height()) +
                         " does not match the image size");
  }
}

}  // namespace

std::string_view DatasetFormatName(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::kRefcocoJson: return "refcoco_json";
    case DatasetFormat::kReasonsegDir: return "reasonseg_dir";
    case DatasetFormat::kAresJson: return "ares_json";
    case DatasetFormat::kSynthetic: return "synthetic";
  }
  return "?";
}

DatasetFormat ParseDatasetFormat(std::string_view name) {
  for (auto f : {DatasetFormat::kRefcocoJson, DatasetFormat::kReasonsegDir,
                 DatasetFormat::kAresJson, DatasetFormat::kSynthetic}) {
    if (DatasetFormatName(f) == name) return f;
  }
  throw ConfigError("unknown dataset format: " + std::string(name));
}

std::vector<int> ArrayElementLines(std::string_view s, std::string_view key) {
  std::vector<int> lines;
  int line = 1, depth = 0;
  bool key_pending = false, in_array = false, expect = false;
  std::string last;
  for (size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '\n') {
      ++line;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (expect && c != ']') {
      lines.push_back(line);
      expect = false;
    }
    switch (c) {
      case '"': {
        size_t j = i + 1;
        std::string str;
        for (; j < s.size() && s[j] != '"'; ++j) {
          if (s[j] == '\\') ++j;
          else str += s[j];
        }
        last = std::move(str);
        i = j;
        break;
      }
      case '{':
      case '[':
        ++depth;
        if (c == '[' && depth == 2 && key_pending) {
          in_array = true;
          expect = true;
        }
        key_pending = false;
        break;
      case '}':
      case ']':
        if (c == ']' && in_array && depth == 2) in_array = expect = false;
        --depth;
        break;
      case ':':
        key_pending = depth == 1 && last == key;
        break;
      case ',':
        if (in_array && depth == 2) expect = true;
        key_pending = false;
        break;
      default:
        break;
    }
  }
  return lines;
}

BinaryMask DecodeCocoRle(int width, int height, const nlohmann::json& counts) {
  std::vector<int64_t> cnts;
  if (counts.is_string()) {
    const std::string s = counts.get<std::string>();
    size_t p = 0;
    while (p < s.size()) {
      int64_t x = 0;
      int k = 0;
      bool more = true;
      while (more) {
        if (p >= s.size()) throw ParseError("truncated compressed RLE");
        const int64_t c = static_cast<int64_t>(s[p]) - 48;
        if (c < 0 || c > 63) throw ParseError("bad character in compressed RLE");
        x |= (c & 0x1f) << (5 * k);
        more = (c & 0x20) != 0;
        ++p;
        ++k;
        if (!more && (c & 0x10)) x |= -(int64_t{1} << (5 * k));
      }
      if (cnts.size() > 2) x += cnts[cnts.size() - 2];
      cnts.push_back(x);
    }
  } else if (counts.is_array()) {
    cnts = counts.get<std::vector<int64_t>>();
  } else {
    throw ParseError("RLE counts must be a list or a string");
  }
  const int64_t total = static_cast<int64_t>(width) * height;
  std::vector<uint8_t> dense(static_cast<size_t>(total), 0);
  int64_t pos = 0;
  for (size_t i = 0; i < cnts.size(); ++i) {
    if (cnts[i] < 0 || pos + cnts[i] > total) {
      throw ParseError("RLE counts do not fit a " + std::to_string(width) + "x" +
                       std::to_string(height) + " grid");
    }
    if (i % 2 == 1) {
      for (int64_t k = pos; k < pos + cnts[i]; ++k) {
        // column-major flat index -> row-major
        const int64_t x = k / height, y = k % height;
        dense[static_cast<size_t>(y * width + x)] = 1;
      }
    }
    pos += cnts[i];
  }
  return BinaryMask::FromDense(width, height, dense);
}

std::vector<Sample> LoadAresJson(const std::string& path) {
  const std::string text = ReadText(path);
  const nlohmann::json doc = ParseText(text, path);
  if (!doc.is_object() || !doc.contains("samples") || !doc["samples"].is_array()) {
    throw ParseError(path + ": expected an object with a \"samples\" array");
  }
  const std::vector<int> lines = ArrayElementLines(text, "samples");
  const fs::path dir = fs::path(path).parent_path();
  std::vector<Sample> out;
  for (size_t i = 0; i < doc["samples"].size(); ++i) {
    const nlohmann::json& j = doc["samples"][i];
    out.push_back(WithContext(Context(path, i, lines), [&] {
      const std::string image = j.at("image").get<std::string>();
      std::optional<BinaryMask> gt;
      if (j.contains("mask") && !j["mask"].is_null()) gt = MaskFromJson(j["mask"]);
      CheckGrid(gt, j);
      const std::string id = j.at("id").get<std::string>();
      return Sample{id, j.value("image_id", fs::path(image).stem().string()),
                    (dir / image).lexically_normal().string(),
                    Expression(j.at("expression").get<std::string>()), gt};
    }));
  }
  return out;
}

void SaveAresJson(const std::vector<Sample>& samples, const std::string& path) {
  const fs::path dir = fs::absolute(path).parent_path();
  std::ostringstream ss;
  ss << "{\"samples\": [";
  for (size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    nlohmann::json j = {
        {"id", s.sample_id},
        {"image_id", s.image_id},
        {"image", fs::absolute(s.image_path).lexically_relative(dir).generic_string()},
        {"expression", s.expression.text()},
        {"mask", s.gt_mask ? MaskToJson(*s.gt_mask) : nlohmann::json(nullptr)}};
    if (s.gt_mask) {
      j["width"] = s.gt_mask->width();
      j["height"] = s.gt_mask->height();
    }
    ss << (i ? ",\n" : "\n") << j.dump();
  }
  ss << "\n]}\n";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << ss.str();
}

std::vector<Sample> LoadRefcocoJson(const std::string& path) {
  const std::string text = ReadText(path);
  const nlohmann::json doc = ParseText(text, path);
  if (!doc.is_object() || !doc.contains("images") || !doc.contains("refs")) {
    throw ParseError(path + ": expected \"images\" and \"refs\"");
  }
  const fs::path dir = fs::path(path).parent_path();
  const fs::path root = dir / doc.value("image_root", std::string("."));
  struct Img {
    std::string file;
    int width, height;
  };
  std::map<std::string, Img> images;
  for (const auto& im : doc["images"]) {
    const std::string id = im.at("id").is_string() ? im["id"].get<std::string>()
                                                   : std::to_string(im["id"].get<int64_t>());
    images[id] = {im.at("file_name").get<std::string>(), im.at("width").get<int>(),
                  im.at("height").get<int>()};
  }
  const std::vector<int> lines = ArrayElementLines(text, "refs");
  std::vector<Sample> out;
  for (size_t i = 0; i < doc["refs"].size(); ++i) {
    const nlohmann::json& r = doc["refs"][i];
    WithContext(Context(path, i, lines), [&] {
      const auto& iid = r.at("image_id");
      const std::string image_id =
          iid.is_string() ? iid.get<std::string>() : std::to_string(iid.get<int64_t>());
      auto it = images.find(image_id);
      if (it == images.end()) throw ParseError("unknown image_id " + image_id);
      const Img& img = it->second;
      std::optional<BinaryMask> gt;
      if (r.contains("segmentation") && !r["segmentation"].is_null()) {
        const auto& seg = r["segmentation"];
        const auto size = seg.at("size").get<std::vector<int>>();
        if (size.size() != 2) throw ParseError("segmentation size must be [h, w]");
        if (size[0] != img.height || size[1] != img.width) {
          throw DimensionError("segmentation size does not match the image");
        }
        gt = DecodeCocoRle(img.width, img.height, seg.at("counts"));
      }
      std::string ref_id = std::to_string(i);
      if (r.contains("ref_id")) {
        ref_id = r["ref_id"].is_string() ? r["ref_id"].get<std::string>() : r["ref_id"].dump();
      }
      const auto& sents = r.at("sentences");
      for (size_t k = 0; k < sents.size(); ++k) {
        const std::string sent = sents[k].is_string()
                                     ? sents[k].get<std::string>()
                                     : sents[k].at("sent").get<std::string>();
        out.push_back(Sample{"ref" + ref_id + "_" + std::to_string(k), image_id,
                             (root / img.file).lexically_normal().string(),
                             Expression(sent), gt});
      }
      return 0;
    });
  }
  return out;
}

std::vector<Sample> LoadReasonsegDir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ParseError(dir + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Sample> out;
  for (const fs::path& f : files) {
    const std::string name = f.stem().string();
    WithContext(f.string(), [&] {
      const nlohmann::json j = ParseText(ReadText(f.string()), f.string());
      fs::path image;
      for (const char* ext : {".jpg", ".png", ".jpeg"}) {
        const fs::path p = f.parent_path() / (name + ext);
        if (fs::exists(p)) {
          image = p;
          break;
        }
      }
      if (image.empty()) throw ParseError("no image next to " + f.filename().string());
      std::optional<BinaryMask> gt;
      if (j.contains("mask") && !j["mask"].is_null()) gt = MaskFromJson(j["mask"]);
      CheckGrid(gt, j);
      std::vector<std::string> texts;
      if (j.at("text").is_string()) texts.push_back(j["text"].get<std::string>());
      else texts = j["text"].get<std::vector<std::string>>();
      for (size_t k = 0; k < texts.size(); ++k) {
        out.push_back(Sample{texts.size() == 1 ? name : name + "_" + std::to_string(k),
                             name, image.lexically_normal().string(),
                             Expression(texts[k]), gt});
      }
      return 0;
    });
  }
  return out;
}

std::vector<Sample> LoadDataset(DatasetFormat format, const std::string& path) {
  switch (format) {
    case DatasetFormat::kAresJson: return LoadAresJson(path);
    case DatasetFormat::kRefcocoJson: return LoadRefcocoJson(path);
    case DatasetFormat::kReasonsegDir: return LoadReasonsegDir(path);
    case DatasetFormat::kSynthetic: {
      const fs::path manifest = fs::path(path) / synthetic::kDatasetFile;
      if (!fs::exists(manifest)) synthetic::WriteFixtures(path);
      return LoadAresJson(manifest.string());
    }
  }
  throw ConfigError("unknown dataset format");
}

}  // namespace refseg
