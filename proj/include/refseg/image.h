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

#ifndef REFSEG_IMAGE_H_
#define REFSEG_IMAGE_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace refseg {

struct Rgb {
  uint8_t r = 0;
  uint8_t g = 0;
  uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

inline constexpr Rgb kBlack{0, 0, 0};
inline constexpr Rgb kGreen{0, 255, 0};
inline constexpr Rgb kRed{255, 0, 0};

// Row-major 8-bit RGB.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, Rgb fill = kBlack);
  // Takes a width*height*3 buffer; throws DimensionError otherwise.
  RgbImage(int width, int height, std::vector<uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<uint8_t>& pixels() const { return pixels_; }
  std::vector<uint8_t>& mutable_pixels() { return pixels_; }

  Rgb at(int x, int y) const {
    const size_t i = Offset(x, y);
    return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const size_t i = Offset(x, y);
    pixels_[i] = c.r;
    pixels_[i + 1] = c.g;
    pixels_[i + 2] = c.b;
  }

  bool operator==(const RgbImage&) const = default;

 private:
  size_t Offset(int x, int y) const {
    return (static_cast<size_t>(y) * width_ + x) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<uint8_t> pixels_;
};

// SHA-256 over the dimensions and raw pixel bytes. Content-addresses
// renders for caching and keys the scripted mocks.
std::string ImageHash(const RgbImage& image);

// Decodes any format OpenCV understands (PNG, JPEG, ...).
RgbImage LoadImage(const std::string& path);
RgbImage DecodeImage(const std::string& bytes);

// Deterministic PNG encoding; `text` entries become tEXt chunks.
std::string EncodePng(const RgbImage& image,
                      const std::map<std::string, std::string>& text = {});
void WritePng(const RgbImage& image, const std::string& path,
              const std::map<std::string, std::string>& text = {});

}  // namespace refseg

#endif  // REFSEG_IMAGE_H_
