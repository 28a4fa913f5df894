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


#include "superocr/supergen.hpp"

#include "superocr/bytes.hpp"
#include "superocr/error.hpp"

namespace superocr {

namespace {
constexpr std::uint8_t kArchiveVersion = 1;
}  // namespace

std::vector<PrefixSample> Expand(const LabeledScene& scene, const LayoutSpec& layout,
                                 const GlyphFont& font, const Alphabet& alphabet) {
  const int n = static_cast<int>(scene.label.size());
  if (n != layout.string_len()) {
    Fail(ErrorKind::kInvalidArgument,
         "label length " + std::to_string(n) + " does not match layout string length " +
             std::to_string(layout.string_len()));
  }
  const std::vector<int> classes = alphabet.Encode(scene.label);

  std::vector<PrefixSample> out;
  out.reserve(n);
  Image canvas = Compose(scene.image, SymbolString(), layout, font);
  for (int k = 0; k < n; ++k) {
    // Samples differ only in slot k-1, so each image extends the previous one.
    if (k > 0) {
      DrawGlyph(canvas, font, scene.label[k - 1], layout.slots[k - 1], layout.fg,
                layout.bg);
    }
    out.push_back(PrefixSample{canvas, k, classes[k], scene.scene_id});
  }
  return out;
}

std::string MeterReading(const std::vector<int>& classes) {
  if (classes.size() != 5) {
    Fail(ErrorKind::kInvalidArgument,
         "a meter reading has 5 characters, got " + std::to_string(classes.size()));
  }
  std::string out;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const int c = classes[i];
    if (c < 0 || c > 19) {
      Fail(ErrorKind::kInvalidArgument, "meter class out of range: " + std::to_string(c));
    }
    if (c < 10) {
      out += static_cast<char>('0' + c);
    } else if (i + 1 < classes.size()) {
      out += static_cast<char>('0' + (c - 10));
    } else {
      out += static_cast<char>('0' + (c - 10));
      out += ".5";
    }
  }
  return out;
}

SampleArchive::SampleArchive(int width, int height, int channels, int class_count)
    : width_(width), height_(height), channels_(channels), class_count_(class_count) {
  Require(width >= 1 && width <= 0xFFFF && height >= 1 && height <= 0xFFFF,
          ErrorKind::kInvalidArgument, "archive canvas size out of range");
  Require(channels == 1 || channels == 3, ErrorKind::kInvalidArgument,
          "archive channels must be 1 or 3");
  Require(class_count >= 1 && class_count <= 0xFFFF, ErrorKind::kInvalidArgument,
          "archive class count out of range");
}

void SampleArchive::Reserve(std::size_t n) {
  targets_.reserve(n);
  prefix_lens_.reserve(n);
  pixels_.reserve(n * sample_bytes());
}

void SampleArchive::Add(const PrefixSample& sample) {
  Require(sample.image.width() == width_ && sample.image.height() == height_ &&
              sample.image.channels() == channels_,
          ErrorKind::kShape, "sample image does not match archive geometry");
  Add(sample.image.pixels(), sample.target_class, sample.prefix_len);
}

void SampleArchive::Add(std::span<const std::uint8_t> pixels, int target_class,
                        int prefix_len) {
  Require(pixels.size() == sample_bytes(), ErrorKind::kShape,
          "sample pixel count does not match archive geometry");
  Require(target_class >= 0 && target_class < class_count_, ErrorKind::kMissingClass,
          "target class out of range");
  Require(prefix_len >= 0 && prefix_len <= 255, ErrorKind::kInvalidArgument,
          "prefix length out of range");
  targets_.push_back(static_cast<std::uint16_t>(target_class));
  prefix_lens_.push_back(static_cast<std::uint8_t>(prefix_len));
  pixels_.insert(pixels_.end(), pixels.begin(), pixels.end());
}

Image SampleArchive::image(std::size_t i) const {
  auto px = pixels(i);
  return Image(width_, height_, channels_, std::vector<std::uint8_t>(px.begin(), px.end()));
}

std::vector<std::size_t> SampleArchive::ClassHistogram() const {
  std::vector<std::size_t> hist(class_count_, 0);
  for (auto t : targets_) ++hist[t];
  return hist;
}

std::vector<std::uint8_t> SampleArchive::Serialize() const {
  ByteWriter w;
  w.buffer().reserve(16 + size() * (3 + sample_bytes()));
  w.Tag("SOCR");
  w.U8(kArchiveVersion);
  w.U16(static_cast<std::uint16_t>(width_));
  w.U16(static_cast<std::uint16_t>(height_));
  w.U8(static_cast<std::uint8_t>(channels_));
  w.U16(static_cast<std::uint16_t>(class_count_));
  w.U32(static_cast<std::uint32_t>(size()));
  for (std::size_t i = 0; i < size(); ++i) {
    w.U16(targets_[i]);
    w.U8(prefix_lens_[i]);
    w.Bytes(pixels(i));
  }
  return w.Take();
}

SampleArchive SampleArchive::Deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (!r.Tag("SOCR")) Fail(ErrorKind::kFormat, "not a sample archive (bad magic)");
  const std::uint8_t version = r.U8();
  if (version != kArchiveVersion) {
    Fail(ErrorKind::kFormat, "unsupported sample archive version " + std::to_string(version));
  }
  const int w = r.U16();
  const int h = r.U16();
  const int ch = r.U8();
  const int classes = r.U16();
  const std::uint32_t count = r.U32();
  SampleArchive archive;
  try {
    archive = SampleArchive(w, h, ch, classes);
  } catch (const Error& e) {
    Fail(ErrorKind::kFormat, std::string("bad sample archive header: ") + e.what());
  }
  if (r.remaining() != static_cast<std::size_t>(count) * (3 + archive.sample_bytes())) {
    Fail(ErrorKind::kFormat, "sample archive size does not match its header");
  }
  archive.Reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const int target = r.U16();
    const int prefix = r.U8();
    if (target >= classes) Fail(ErrorKind::kFormat, "sample target out of range");
    archive.Add(r.Bytes(archive.sample_bytes()), target, prefix);
  }
  return archive;
}

void SampleArchive::Save(const std::string& path) const {
  WriteFileBytes(path, Serialize());
}

SampleArchive SampleArchive::Load(const std::string& path) {
  return Deserialize(ReadFileBytes(path));
}

SampleArchive BuildTrainingSet(const std::vector<LabeledScene>& scenes,
                               const LayoutSpec& layout, const GlyphFont& font,
                               const Alphabet& alphabet) {
  Require(!scenes.empty(), ErrorKind::kInvalidArgument, "no scenes to expand");
  SampleArchive archive(layout.canvas_w, layout.canvas_h, scenes.front().image.channels(),
                        alphabet.class_count());
  archive.Reserve(scenes.size() * layout.string_len());
  for (const auto& scene : scenes) {
    try {
      for (const auto& sample : Expand(scene, layout, font, alphabet)) archive.Add(sample);
    } catch (const Error& e) {
      throw Error(e.kind(), "scene " + SceneIdHex(scene.scene_id) + ": " + e.what());
    }
  }
  return archive;
}

}  // namespace superocr
