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


#ifndef SUPEROCR_TASKGEN_HPP_
#define SUPEROCR_TASKGEN_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "superocr/alphabet.hpp"
#include "superocr/canvas.hpp"
#include "superocr/image.hpp"

namespace superocr {

// Parameters of the synthetic fixed-length OCR scene generator. Ranges are
// closed intervals sampled uniformly per scene.
struct TaskConfig {
  Alphabet alphabet = Alphabet::Hex16();
  int string_len = 5;
  int scene_w = 96;
  int scene_h = 48;
  double glyph_scale_lo = 2.2;
  double glyph_scale_hi = 3.0;
  double glyph_stretch = 1.0;    // extra vertical scale of the glyph cell
  double rotation_deg = 0.0;     // rotation drawn from [-r, +r]
  double shear = 0.0;            // horizontal shear drawn from [-s, +s]
  double brightness_lo = 0.0;
  double brightness_hi = 0.0;
  double fog_max = 0.0;          // blend toward white by a factor in [0, fog_max]
  double noise_sigma = 0.0;
  int placement_jitter = 0;
  std::uint8_t background = 200;
  std::uint8_t ink = 30;
  bool textured = false;
  std::uint64_t seed = 1;

  void Validate() const;
};

// Desk-scale generator presets mirroring the plate-benchmark subset names.
const std::vector<std::string>& SubsetNames();
// `base` supplies alphabet, sizes and seed; the preset sets the distortion
// parameters and salts the seed with the subset name.
TaskConfig SubsetConfig(const std::string& subset, const TaskConfig& base);

struct LabeledScene {
  Image image;
  SymbolString label;
  std::uint64_t scene_id = 0;
};

// Deterministic in (cfg, index).
LabeledScene GenScene(const TaskConfig& cfg, std::uint64_t index);

// Rotation about the image center with inverse bilinear mapping; taps
// outside the source read `fill`. Positive angles turn content clockwise in
// image coordinates (y down).
Image Rotate(const Image& src, double degrees, std::uint8_t fill);

// Scenes for indices offset .. offset+count-1. `workers` > 1 generates in
// parallel with identical output.
std::vector<LabeledScene> GenSplit(const TaskConfig& cfg, std::size_t count,
                                   std::uint64_t offset, int workers = 1);

// Dataset archive: `manifest.tsv` lines "<image path>\t<label>" plus PGM
// files named scene_<16 hex digit id>.pgm.
void WriteDataset(const std::string& dir, const std::vector<LabeledScene>& scenes);
std::vector<LabeledScene> ReadDataset(const std::string& dir);
// SHA-256 (hex) over the manifest and every referenced file, in manifest order.
std::string DatasetHash(const std::string& dir);

std::string SceneIdHex(std::uint64_t id);

}  // namespace superocr

#endif  // SUPEROCR_TASKGEN_HPP_
