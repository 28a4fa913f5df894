/* Copyright 2026 The SuperOCR Authors. All Rights Reserved.

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

#ifndef SUPEROCR_IMAGE_HPP_
#define SUPEROCR_IMAGE_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace superocr {

// Row-major, channel-interleaved 8-bit pixel grid.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels = 1, std::uint8_t fill = 0);
  Image(int width, int height, int channels, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return pixels_.empty(); }

  std::uint8_t at(int x, int y, int c = 0) const {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  std::uint8_t& at(int x, int y, int c = 0) {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> pixels_;
};

struct Rect {
  int x = 0;
  int y = 0;
  int w = 1;
  int h = 1;

  bool Inside(int width, int height) const {
    return w >= 1 && h >= 1 && x >= 0 && y >= 0 && x + w <= width &&
           y + h <= height;
  }
  bool Contains(int px, int py) const {
    return px >= x && px < x + w && py >= y && py < y + h;
  }
  bool Overlaps(const Rect& o) const {
    return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

// Binary PGM (P5) for one channel, PPM (P6) for three. maxval is always 255.
std::vector<std::uint8_t> EncodePnm(const Image& image);
Image DecodePnm(std::span<const std::uint8_t> bytes);
void WritePnm(const Image& image, const std::string& path);
Image ReadPnm(const std::string& path);

}  // namespace superocr

#endif  // SUPEROCR_IMAGE_HPP_
