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


#ifndef SUPEROCR_CANVAS_HPP_
#define SUPEROCR_CANVAS_HPP_

#include <cstdint>
#include <map>
#include <vector>

#include "superocr/alphabet.hpp"
#include "superocr/image.hpp"

namespace superocr {

// Monochrome bitmap font with a fixed cell size. Bits are row-major, one
// byte per cell pixel (0 or 1).
class GlyphFont {
 public:
  GlyphFont(int cell_w, int cell_h) : cell_w_(cell_w), cell_h_(cell_h) {}

  // The 5x7 font shipped with the library: digits, A-Z, the watermeter
  // intermediate states a-j and 31 synthetic province glyphs.
  static const GlyphFont& Builtin();

  int cell_w() const { return cell_w_; }
  int cell_h() const { return cell_h_; }

  void Add(Symbol symbol, std::vector<std::uint8_t> bits);
  bool Has(Symbol symbol) const { return glyphs_.count(symbol) != 0; }
  // Throws kMissingGlyph.
  const std::vector<std::uint8_t>& Bits(Symbol symbol) const;
  bool Covers(const Alphabet& alphabet) const;

 private:
  int cell_w_;
  int cell_h_;
  std::map<Symbol, std::vector<std::uint8_t>> glyphs_;
};

// Geometry of a SuperOCR image: the resized scene on top, N-1 glyph slots in
// the strip below it.
struct LayoutSpec {
  int canvas_w = 0;
  int canvas_h = 0;
  Rect scene_region;
  std::vector<Rect> slots;
  std::uint8_t fg = 0;
  std::uint8_t bg = 255;

  int slot_count() const { return static_cast<int>(slots.size()); }
  int string_len() const { return slot_count() + 1; }

  // Scene occupies the top canvas_w x scene_h; the remaining strip is split
  // into slot_count equal-width, full-height, gapless slots.
  static LayoutSpec Make(int canvas_w, int canvas_h, int scene_h,
                         int slot_count);
  static LayoutSpec Ccpd();   // 331x331, scene 331x305, 6 slots
  static LayoutSpec Wnr();    // 224x224, scene 224x150, 4 slots
  static LayoutSpec Desk();   // 96x96, scene 96x64, 4 slots
  // Resolves "ccpd", "wnr" or "desk".
  static LayoutSpec ByName(const std::string& name);

  // Throws kInvalidArgument when an invariant does not hold.
  void Validate() const;
};

// Bilinear resampling with half-pixel centers, rounded half-up.
Image Resize(const Image& src, int out_w, int out_h);

// Fills `slot` with bg and paints the nearest-neighbor scaled glyph, centered
// and as large as the slot allows at the cell aspect ratio.
void DrawGlyph(Image& canvas, const GlyphFont& font, Symbol symbol,
               const Rect& slot, std::uint8_t fg, std::uint8_t bg);

// Builds the SuperOCR image for `scene` with `prefix` drawn into the first
// prefix.size() slots.
Image Compose(const Image& scene, const SymbolString& prefix,
              const LayoutSpec& layout, const GlyphFont& font);

}  // namespace superocr

#endif  // SUPEROCR_CANVAS_HPP_
