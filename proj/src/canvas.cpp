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


#include "superocr/canvas.hpp"

#include <algorithm>
#include <cmath>

#include "superocr/error.hpp"

namespace superocr {

LayoutSpec LayoutSpec::Make(int canvas_w, int canvas_h, int scene_h,
                            int slot_count) {
  Require(canvas_w >= 1 && canvas_h >= 1, ErrorKind::kInvalidArgument,
          "canvas dimensions must be positive");
  Require(scene_h >= 1 && scene_h <= canvas_h, ErrorKind::kInvalidArgument,
          "scene region must fit the canvas");
  Require(slot_count >= 0, ErrorKind::kInvalidArgument,
          "slot count must be non-negative");
  LayoutSpec layout;
  layout.canvas_w = canvas_w;
  layout.canvas_h = canvas_h;
  layout.scene_region = Rect{0, 0, canvas_w, scene_h};
  if (slot_count > 0) {
    int strip_h = canvas_h - scene_h;
    int slot_w = canvas_w / slot_count;
    Require(strip_h >= 1 && slot_w >= 1, ErrorKind::kInvalidArgument,
            "no room for glyph slots below the scene region");
    for (int i = 0; i < slot_count; ++i) {
      layout.slots.push_back(Rect{i * slot_w, scene_h, slot_w, strip_h});
    }
  }
  layout.Validate();
  return layout;
}

LayoutSpec LayoutSpec::Ccpd() { return Make(331, 331, 305, 6); }
LayoutSpec LayoutSpec::Wnr() { return Make(224, 224, 150, 4); }
LayoutSpec LayoutSpec::Desk() { return Make(96, 96, 64, 4); }

LayoutSpec LayoutSpec::ByName(const std::string& name) {
  if (name == "ccpd") return Ccpd();
  if (name == "wnr") return Wnr();
  if (name == "desk") return Desk();
  Fail(ErrorKind::kInvalidArgument, "unknown layout preset: " + name);
}

void LayoutSpec::Validate() const {
  Require(canvas_w >= 1 && canvas_h >= 1, ErrorKind::kInvalidArgument,
          "canvas dimensions must be positive");
  Require(scene_region.Inside(canvas_w, canvas_h), ErrorKind::kInvalidArgument,
          "scene region outside canvas");
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const Rect& s = slots[i];
    Require(s.Inside(canvas_w, canvas_h), ErrorKind::kInvalidArgument,
            "slot outside canvas");
    Require(!s.Overlaps(scene_region), ErrorKind::kInvalidArgument,
            "slot overlaps scene region");
    if (i > 0) {
      Require(slots[i - 1].x < s.x, ErrorKind::kInvalidArgument,
              "slots must be ordered by increasing x");
    }
    for (std::size_t j = 0; j < i; ++j) {
      Require(!slots[j].Overlaps(s), ErrorKind::kInvalidArgument,
              "slots overlap");
    }
  }
}

Image Resize(const Image& src, int out_w, int out_h) {
  Require(out_w >= 1 && out_h >= 1, ErrorKind::kInvalidArgument,
          "resize target must be at least 1x1");
  Require(!src.empty(), ErrorKind::kInvalidArgument, "resize of empty image");
  const int sw = src.width();
  const int sh = src.height();
  const int ch = src.channels();
  Image out(out_w, out_h, ch);
  if (sw == out_w && sh == out_h) {
    std::copy(src.pixels().begin(), src.pixels().end(), out.pixels().begin());
    return out;
  }

  struct Tap {
    int i0, i1;
    double frac;
  };
  auto taps = [](int out_n, int src_n) {
    std::vector<Tap> t(out_n);
    for (int o = 0; o < out_n; ++o) {
      double s = (o + 0.5) * src_n / out_n - 0.5;
      s = std::clamp(s, 0.0, static_cast<double>(src_n - 1));
      int i0 = static_cast<int>(std::floor(s));
      int i1 = std::min(i0 + 1, src_n - 1);
      t[o] = Tap{i0, i1, s - i0};
    }
    return t;
  };
  const auto xs = taps(out_w, sw);
  const auto ys = taps(out_h, sh);

  for (int y = 0; y < out_h; ++y) {
    const Tap& ty = ys[y];
    for (int x = 0; x < out_w; ++x) {
      const Tap& tx = xs[x];
      for (int c = 0; c < ch; ++c) {
        double top = src.at(tx.i0, ty.i0, c) * (1.0 - tx.frac) +
                     src.at(tx.i1, ty.i0, c) * tx.frac;
        double bot = src.at(tx.i0, ty.i1, c) * (1.0 - tx.frac) +
                     src.at(tx.i1, ty.i1, c) * tx.frac;
        double v = top * (1.0 - ty.frac) + bot * ty.frac;
        out.at(x, y, c) =
            static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
      }
    }
  }
  return out;
}

void DrawGlyph(Image& canvas, const GlyphFont& font, Symbol symbol,
               const Rect& slot, std::uint8_t fg, std::uint8_t bg) {
  const auto& bits = font.Bits(symbol);
  Require(slot.Inside(canvas.width(), canvas.height()),
          ErrorKind::kInvalidArgument, "glyph slot outside canvas");
  const int cw = font.cell_w();
  const int chh = font.cell_h();

  // Largest box with the cell aspect ratio that fits the slot.
  int gw, gh;
  if (static_cast<long>(slot.w) * chh <= static_cast<long>(slot.h) * cw) {
    gw = slot.w;
    gh = std::max(1, slot.w * chh / cw);
  } else {
    gh = slot.h;
    gw = std::max(1, slot.h * cw / chh);
  }
  const int ox = slot.x + (slot.w - gw) / 2;
  const int oy = slot.y + (slot.h - gh) / 2;
  const int channels = canvas.channels();

  for (int y = slot.y; y < slot.y + slot.h; ++y) {
    for (int x = slot.x; x < slot.x + slot.w; ++x) {
      std::uint8_t v = bg;
      if (x >= ox && x < ox + gw && y >= oy && y < oy + gh) {
        int sx = (x - ox) * cw / gw;
        int sy = (y - oy) * chh / gh;
        if (bits[sy * cw + sx]) v = fg;
      }
      for (int c = 0; c < channels; ++c) canvas.at(x, y, c) = v;
    }
  }
}

Image Compose(const Image& scene, const SymbolString& prefix,
              const LayoutSpec& layout, const GlyphFont& font) {
  Require(!scene.empty(), ErrorKind::kInvalidArgument, "empty scene");
  if (static_cast<int>(prefix.size()) > layout.slot_count()) {
    Fail(ErrorKind::kCapacity, "prefix of length " +
                                   std::to_string(prefix.size()) +
                                   " exceeds " +
                                   std::to_string(layout.slot_count()) +
                                   " slots");
  }
  Image canvas(layout.canvas_w, layout.canvas_h, scene.channels(), layout.bg);
  const Rect& region = layout.scene_region;
  Image resized = Resize(scene, region.w, region.h);
  for (int y = 0; y < region.h; ++y) {
    for (int x = 0; x < region.w; ++x) {
      for (int c = 0; c < scene.channels(); ++c) {
        canvas.at(region.x + x, region.y + y, c) = resized.at(x, y, c);
      }
    }
  }
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    DrawGlyph(canvas, font, prefix[i], layout.slots[i], layout.fg, layout.bg);
  }
  return canvas;
}

}  // namespace superocr
