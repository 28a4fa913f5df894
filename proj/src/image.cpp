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


#include "superocr/image.hpp"

#include <cctype>
#include <fstream>
#include <iterator>

#include "superocr/error.hpp"

namespace superocr {

Image::Image(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
  Require(width >= 1 && height >= 1, ErrorKind::kInvalidArgument,
          "image dimensions must be positive");
  Require(channels == 1 || channels == 3, ErrorKind::kInvalidArgument,
          "image must have 1 or 3 channels");
  pixels_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image::Image(int width, int height, int channels,
             std::vector<std::uint8_t> pixels)
    : Image(width, height, channels) {
  Require(pixels.size() == pixels_.size(), ErrorKind::kInvalidArgument,
          "pixel buffer length does not match image dimensions");
  pixels_ = std::move(pixels);
}

std::vector<std::uint8_t> EncodePnm(const Image& image) {
  Require(!image.empty(), ErrorKind::kInvalidArgument, "empty image");
  std::string header = std::string(image.channels() == 1 ? "P5" : "P6") +
                       "\n" + std::to_string(image.width()) + " " +
                       std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels().begin(), image.pixels().end());
  return out;
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string Token() {
    SkipSpaceAndComments();
    std::string tok;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) {
      tok.push_back(static_cast<char>(bytes_[pos_++]));
    }
    if (tok.empty()) Fail(ErrorKind::kFormat, "truncated PNM header");
    return tok;
  }

  int Number() {
    std::string tok = Token();
    for (char c : tok) {
      if (!std::isdigit(static_cast<unsigned char>(c)))
        Fail(ErrorKind::kFormat, "bad PNM header field: " + tok);
    }
    if (tok.size() > 6) Fail(ErrorKind::kFormat, "PNM dimension too large");
    return std::stoi(tok);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t RasterStart() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
      Fail(ErrorKind::kFormat, "missing PNM raster separator");
    return pos_ + 1;
  }

 private:
  void SkipSpaceAndComments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Image DecodePnm(std::span<const std::uint8_t> bytes) {
  HeaderReader reader(bytes);
  std::string magic = reader.Token();
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    Fail(ErrorKind::kFormat, "unsupported PNM magic: " + magic);
  }
  int w = reader.Number();
  int h = reader.Number();
  int maxval = reader.Number();
  if (w < 1 || h < 1) Fail(ErrorKind::kFormat, "PNM dimensions must be positive");
  if (maxval != 255) Fail(ErrorKind::kFormat, "only maxval 255 is supported");
  std::size_t start = reader.RasterStart();
  std::size_t need = static_cast<std::size_t>(w) * h * channels;
  if (bytes.size() < start + need) Fail(ErrorKind::kFormat, "truncated PNM raster");
  return Image(w, h, channels,
               std::vector<std::uint8_t>(bytes.begin() + start,
                                         bytes.begin() + start + need));
}

void WritePnm(const Image& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorKind::kIo, "cannot open for writing: " + path);
  auto bytes = EncodePnm(image);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorKind::kIo, "write failed: " + path);
}

Image ReadPnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return DecodePnm(bytes);
}

}  // namespace superocr
