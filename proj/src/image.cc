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

#include "refseg/image.h"

#include <png.h>

#include <fstream>
#include <opencv2/imgcodecs.hpp>
#include <sstream>

#include "refseg/errors.h"
#include "refseg/hashing.h"

namespace refseg {
namespace {

RgbImage FromBgrMat(const cv::Mat& mat) {
  if (mat.empty()) throw ParseError("image could not be decoded");
  if (mat.type() != CV_8UC3) throw ParseError("expected an 8-bit color image");
  RgbImage image(mat.cols, mat.rows);
  auto& px = image.mutable_pixels();
  for (int y = 0; y < mat.rows; ++y) {
    const uint8_t* row = mat.ptr<uint8_t>(y);
    for (int x = 0; x < mat.cols; ++x) {
      const size_t o = (static_cast<size_t>(y) * mat.cols + x) * 3;
      px[o] = row[3 * x + 2];
      px[o + 1] = row[3 * x + 1];
      px[o + 2] = row[3 * x];
    }
  }
  return image;
}

void AppendToString(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), length);
}

}  // namespace

RgbImage::RgbImage(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) throw InvalidInputError("image must be >= 1x1");
  pixels_.resize(static_cast<size_t>(width) * height * 3);
  for (size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
  }
}

RgbImage::RgbImage(int width, int height, std::vector<uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1) throw InvalidInputError("image must be >= 1x1");
  if (pixels_.size() != static_cast<size_t>(width) * height * 3) {
    throw DimensionError("pixel buffer length must equal width*height*3");
  }
}

std::string ImageHash(const RgbImage& image) {
  std::ostringstream os;
  os << image.width() << "x" << image.height() << ":";
  std::string data = os.str();
  data.append(reinterpret_cast<const char*>(image.pixels().data()),
              image.pixels().size());
  return Sha256Hex(data);
}

RgbImage LoadImage(const std::string& path) {
  cv::Mat mat = cv::imread(path, cv::IMREAD_COLOR);
  if (mat.empty()) throw InvalidInputError("cannot read image " + path);
  return FromBgrMat(mat);
}

RgbImage DecodeImage(const std::string& bytes) {
  std::vector<uint8_t> buf(bytes.begin(), bytes.end());
  return FromBgrMat(cv::imdecode(buf, cv::IMREAD_COLOR));
}

std::string EncodePng(const RgbImage& image,
                      const std::map<std::string, std::string>& text) {
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw std::runtime_error("png_create_write_struct");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png_create_info_struct");
  }
  std::string out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng encode failure");
  }
  png_set_write_fn(png, &out, AppendToString, nullptr);
  png_set_IHDR(png, info, image.width(), image.height(), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  std::vector<png_text> chunks;
  chunks.reserve(text.size());
  for (const auto& [key, value] : text) {
    png_text t{};
    t.compression = PNG_TEXT_COMPRESSION_NONE;
    t.key = const_cast<char*>(key.c_str());
    t.text = const_cast<char*>(value.c_str());
    t.text_length = value.size();
    chunks.push_back(t);
  }
  if (!chunks.empty()) {
    png_set_text(png, info, chunks.data(), static_cast<int>(chunks.size()));
  }
  png_write_info(png, info);
  const size_t stride = static_cast<size_t>(image.width()) * 3;
  for (int y = 0; y < image.height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(image.pixels().data() + y * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

void WritePng(const RgbImage& image, const std::string& path,
              const std::map<std::string, std::string>& text) {
  const std::string bytes = EncodePng(image, text);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace refseg
