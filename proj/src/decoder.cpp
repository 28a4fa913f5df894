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


#include "superocr/decoder.hpp"

#include "superocr/error.hpp"

namespace superocr {

std::vector<float> NetworkClassifier::Scores(const Image& canvas) {
  Tensor logits = net_.Forward(canvas);
  return std::vector<float>(logits.values().begin(), logits.values().end());
}

int ArgMax(const std::vector<float>& scores) {
  Require(!scores.empty(), ErrorKind::kContract, "classifier returned no scores");
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

SymbolString Decode(const Image& scene, Classifier& clf, const LayoutSpec& layout,
                    const GlyphFont& font, const Alphabet& alphabet, int string_len,
                    const std::function<void(const DecodeState&)>& observer) {
  Require(string_len >= 1, ErrorKind::kInvalidArgument, "string length must be >= 1");
  if (string_len != layout.string_len()) {
    Fail(ErrorKind::kInvalidArgument, "string length " + std::to_string(string_len) +
                                          " does not match a layout with " +
                                          std::to_string(layout.slot_count()) + " slots");
  }
  Require(clf.class_count() == alphabet.class_count(), ErrorKind::kContract,
          "classifier and alphabet disagree on the class count");
  DecodeState state;
  state.canvas = Compose(scene, SymbolString(), layout, font);
  for (int k = 0; k < string_len; ++k) {
    if (observer) observer(state);
    const std::vector<float> scores = clf.Scores(state.canvas);
    if (static_cast<int>(scores.size()) != alphabet.class_count()) {
      Fail(ErrorKind::kContract, "classifier returned " + std::to_string(scores.size()) +
                                     " scores for " + std::to_string(alphabet.class_count()) +
                                     " classes");
    }
    const Symbol s = alphabet.symbol(ArgMax(scores));
    state.predicted.push_back(s);
    ++state.step;
    if (k + 1 < string_len) {
      DrawGlyph(state.canvas, font, s, layout.slots[k], layout.fg, layout.bg);
    }
  }
  return state.predicted;
}

TeacherForcedReport TeacherForcedAccuracy(const std::vector<LabeledScene>& scenes,
                                          Classifier& clf, const LayoutSpec& layout,
                                          const GlyphFont& font, const Alphabet& alphabet) {
  Require(!scenes.empty(), ErrorKind::kInvalidArgument, "no scenes");
  const int n = layout.string_len();
  std::vector<std::size_t> hits(n, 0);
  for (const auto& scene : scenes) {
    Require(static_cast<int>(scene.label.size()) == n, ErrorKind::kInvalidArgument,
            "scene " + SceneIdHex(scene.scene_id) + " label length does not match the layout");
    Image canvas = Compose(scene.image, SymbolString(), layout, font);
    for (int k = 0; k < n; ++k) {
      if (k > 0) {
        DrawGlyph(canvas, font, scene.label[k - 1], layout.slots[k - 1], layout.fg, layout.bg);
      }
      const std::vector<float> scores = clf.Scores(canvas);
      Require(static_cast<int>(scores.size()) == alphabet.class_count(), ErrorKind::kContract,
              "classifier output length mismatch");
      if (alphabet.symbol(ArgMax(scores)) == scene.label[k]) ++hits[k];
    }
  }
  TeacherForcedReport report;
  std::size_t total = 0;
  for (int k = 0; k < n; ++k) {
    report.per_position.push_back(static_cast<double>(hits[k]) / scenes.size());
    total += hits[k];
  }
  report.overall = static_cast<double>(total) / (static_cast<double>(scenes.size()) * n);
  return report;
}

}  // namespace superocr
