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


#include <array>
#include <cstdint>

#include "superocr/canvas.hpp"
#include "superocr/error.hpp"

namespace superocr {

namespace {

// 5x7 cells, one byte per row, bit 4 is the leftmost column.
struct GlyphRows {
  char32_t symbol;
  std::array<std::uint8_t, 7> rows;
};

constexpr GlyphRows kGlyphs[] = {
    {U'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {U'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {U'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {U'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {U'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {U'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {U'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {U'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {U'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {U'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {U'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {U'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
    {U'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}},
    {U'D', {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C}},
    {U'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}},
    {U'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {U'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}},
    {U'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {U'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {U'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
    {U'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
    {U'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
    {U'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}},
    {U'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}},
    {U'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {U'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
    {U'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}},
    {U'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
    {U'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}},
    {U'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {U'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {U'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {U'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}},
    {U'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {U'Y', {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}},
    {U'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
};

constexpr int kCellW = 5;
constexpr int kCellH = 7;

std::vector<std::uint8_t> Unpack(const std::array<std::uint8_t, 7>& rows) {
  std::vector<std::uint8_t> bits(kCellW * kCellH);
  for (int y = 0; y < kCellH; ++y) {
    for (int x = 0; x < kCellW; ++x) {
      bits[y * kCellW + x] = (rows[y] >> (kCellW - 1 - x)) & 1;
    }
  }
  return bits;
}

std::uint64_t SplitMix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

GlyphFont BuildBuiltin() {
  GlyphFont font(kCellW, kCellH);
  const std::array<std::uint8_t, 7>* digits[10] = {};
  for (const auto& g : kGlyphs) {
    font.Add(g.symbol, Unpack(g.rows));
    if (g.symbol >= U'0' && g.symbol <= U'9') digits[g.symbol - U'0'] = &g.rows;
  }

  // Intermediate wheel states: digit d rolled halfway into d+1. The window
  // starts at row 4 of the strip [d rows, blank row, d+1 rows].
  for (int d = 0; d < 10; ++d) {
    std::array<std::uint8_t, 15> strip{};
    for (int r = 0; r < 7; ++r) {
      strip[r] = (*digits[d])[r];
      strip[8 + r] = (*digits[(d + 1) % 10])[r];
    }
    std::array<std::uint8_t, 7> rows{};
    for (int r = 0; r < 7; ++r) rows[r] = strip[4 + r];
    font.Add(static_cast<char32_t>(U'a' + d), Unpack(rows));
  }

  // Province characters get synthetic, pairwise-distinct glyphs with a
  // solid top bar.
  std::uint64_t state = 0x5EED0CC9D;
  std::vector<std::array<std::uint8_t, 7>> used;
  for (const auto& g : kGlyphs) used.push_back(g.rows);
  const Alphabet plate = Alphabet::Plate();
  for (char32_t c : plate.symbols()) {
    if (font.Has(c)) continue;
    std::array<std::uint8_t, 7> rows{};
    for (;;) {
      rows[0] = 0x1F;
      for (int r = 1; r < 7; ++r) {
        rows[r] = static_cast<std::uint8_t>(SplitMix(state) & 0x1F);
      }
      bool dup = false;
      for (const auto& u : used) dup = dup || u == rows;
      if (!dup) break;
    }
    used.push_back(rows);
    font.Add(c, Unpack(rows));
  }
  return font;
}

}  // namespace

const GlyphFont& GlyphFont::Builtin() {
  static const GlyphFont font = BuildBuiltin();
  return font;
}

void GlyphFont::Add(Symbol symbol, std::vector<std::uint8_t> bits) {
  Require(bits.size() == static_cast<std::size_t>(cell_w_) * cell_h_,
          ErrorKind::kInvalidArgument, "glyph bitmap does not match cell size");
  glyphs_[symbol] = std::move(bits);
}

const std::vector<std::uint8_t>& GlyphFont::Bits(Symbol symbol) const {
  auto it = glyphs_.find(symbol);
  if (it == glyphs_.end()) {
    Fail(ErrorKind::kMissingGlyph,
         "no glyph for symbol '" + ToUtf8(SymbolString(1, symbol)) + "'");
  }
  return it->second;
}

bool GlyphFont::Covers(const Alphabet& alphabet) const {
  for (Symbol s : alphabet.symbols()) {
    if (!Has(s)) return false;
  }
  return true;
}

}  // namespace superocr
