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


#ifndef SUPEROCR_DECODER_HPP_
#define SUPEROCR_DECODER_HPP_

#include <functional>
#include <vector>

#include "superocr/alphabet.hpp"
#include "superocr/canvas.hpp"
#include "superocr/nn.hpp"
#include "superocr/taskgen.hpp"

namespace superocr {

// Next-character predictor: SuperOCR image -> one score per class.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual int class_count() const = 0;
  virtual std::vector<float> Scores(const Image& canvas) = 0;
};

// Float network classifier.
class NetworkClassifier : public Classifier {
 public:
  explicit NetworkClassifier(const Network& net) : net_(net) {}
  int class_count() const override { return net_.class_count(); }
  std::vector<float> Scores(const Image& canvas) override;

 private:
  const Network& net_;
};

// Canvas and predictions after `step` classifications.
struct DecodeState {
  Image canvas;
  SymbolString predicted;
  int step = 0;
};

// Lowest index wins exact ties.
int ArgMax(const std::vector<float>& scores);

// Greedy iterative decoding: classify the canvas, append the argmax symbol,
// draw it into the next slot, repeat for string_len steps. The last
// prediction is not drawn. `observer` sees the state before every
// classification.
SymbolString Decode(const Image& scene, Classifier& clf, const LayoutSpec& layout,
                    const GlyphFont& font, const Alphabet& alphabet, int string_len,
                    const std::function<void(const DecodeState&)>& observer = {});

struct TeacherForcedReport {
  std::vector<double> per_position;  // accuracy for position 1..N
  double overall = 0.0;
};

// Classifies compose(scene, true prefix) for every position of every scene.
TeacherForcedReport TeacherForcedAccuracy(const std::vector<LabeledScene>& scenes,
                                          Classifier& clf, const LayoutSpec& layout,
                                          const GlyphFont& font, const Alphabet& alphabet);

}  // namespace superocr

#endif  // SUPEROCR_DECODER_HPP_
