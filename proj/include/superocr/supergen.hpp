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


#ifndef SUPEROCR_SUPERGEN_HPP_
#define SUPEROCR_SUPERGEN_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "superocr/alphabet.hpp"
#include "superocr/canvas.hpp"
#include "superocr/taskgen.hpp"

namespace superocr {

// One training instance: a SuperOCR image embedding the first prefix_len
// true characters, labeled with the class of the next one.
struct PrefixSample {
  Image image;
  int prefix_len = 0;
  int target_class = 0;
  std::uint64_t scene_id = 0;
};

// Expands one labeled scene into string_len prefix samples; sample k embeds
// label[0..k-1] and targets label[k].
std::vector<PrefixSample> Expand(const LabeledScene& scene, const LayoutSpec& layout,
                                 const GlyphFont& font, const Alphabet& alphabet);

// Interprets five watermeter classes as a reading. Regular classes 0-9 give
// their digit. An intermediate class C (10-19) reads as C-10 unless it is the
// final character, where it reads as C-9.5 (e.g. "6.5").
std::string MeterReading(const std::vector<int>& classes);

// Fixed-geometry collection of prefix samples with a packed pixel store.
class SampleArchive {
 public:
  SampleArchive() = default;
  SampleArchive(int width, int height, int channels, int class_count);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  int class_count() const { return class_count_; }
  std::size_t size() const { return targets_.size(); }
  bool empty() const { return targets_.empty(); }
  std::size_t sample_bytes() const {
    return static_cast<std::size_t>(width_) * height_ * channels_;
  }

  void Add(const PrefixSample& sample);
  void Add(std::span<const std::uint8_t> pixels, int target_class, int prefix_len);
  void Reserve(std::size_t n);

  int target(std::size_t i) const { return targets_[i]; }
  int prefix_len(std::size_t i) const { return prefix_lens_[i]; }
  std::span<const std::uint8_t> pixels(std::size_t i) const {
    return {pixels_.data() + i * sample_bytes(), sample_bytes()};
  }
  Image image(std::size_t i) const;
  // Count of samples per target class.
  std::vector<std::size_t> ClassHistogram() const;

  // Binary format: "SOCR", version byte, canvas_w u16, canvas_h u16,
  // channels u8, class_count u16, count u32, then per sample target u16,
  // prefix_len u8 and the raw pixels. Integers are little-endian.
  std::vector<std::uint8_t> Serialize() const;
  static SampleArchive Deserialize(std::span<const std::uint8_t> bytes);
  void Save(const std::string& path) const;
  static SampleArchive Load(const std::string& path);

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  int class_count_ = 0;
  std::vector<std::uint16_t> targets_;
  std::vector<std::uint8_t> prefix_lens_;
  std::vector<std::uint8_t> pixels_;
};

// Expands every scene. Errors name the offending scene id.
SampleArchive BuildTrainingSet(const std::vector<LabeledScene>& scenes,
                               const LayoutSpec& layout, const GlyphFont& font,
                               const Alphabet& alphabet);

}  // namespace superocr

#endif  // SUPEROCR_SUPERGEN_HPP_
