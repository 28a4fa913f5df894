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


#ifndef SUPEROCR_TESTS_ORACLES_HPP_
#define SUPEROCR_TESTS_ORACLES_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "superocr/alphabet.hpp"
#include "superocr/canvas.hpp"
#include "superocr/decoder.hpp"
#include "superocr/image.hpp"
#include "superocr/nn.hpp"
#include "superocr/taskgen.hpp"
#include "superocr/tensor.hpp"

// Reference implementations for tests. Nothing here calls the production
// operators they check; arithmetic is 64-bit throughout.
namespace superocr::oracle {

// Dense double arrays with an explicit shape.
struct Array {
  std::vector<int> shape;
  std::vector<double> v;

  static Array From(const Tensor& t);
  double& at(int a, int b, int c) { return v[(static_cast<std::size_t>(a) * shape[1] + b) * shape[2] + c]; }
  double at(int a, int b, int c) const {
    return v[(static_cast<std::size_t>(a) * shape[1] + b) * shape[2] + c];
  }
};

Array NaiveConv2d(const Array& x, const Array& w, const Array& b, int stride, int pad);
Array NaiveRelu(const Array& x);
Array NaiveMaxPool(const Array& x, int k, int stride);
Array NaiveFc(const Array& x, const Array& w, const Array& b);
// -log softmax(logits)[target].
double NaiveXent(const std::vector<double>& logits, int target);

// Layer-by-layer composition using the naive operators, parameters read
// from the network.
// `pattern`, if given, receives the relu signs and pooling argmaxes.
Array NaiveForward(const Network& net, const Array& x, std::vector<int>* pattern = nullptr);
// Image to the network input convention, written out independently.
Array NaiveImageInput(const Image& image);

// Central differences, one coordinate at a time.
std::vector<double> FdGradient(const std::function<double(const std::vector<double>&)>& f,
                               std::vector<double> w, double eps);

// max |a-b| / max(|a|, |b|, floor) over all coordinates.
double MaxRelError(const std::vector<double>& a, const std::vector<double>& b,
                   double floor = 1e-6);

// Independent bilinear resize, glyph painter and composer.
Image NaiveResize(const Image& src, int w, int h);
void NaivePaintGlyph(Image& canvas, const GlyphFont& font, Symbol s, const Rect& slot,
                     std::uint8_t fg, std::uint8_t bg);
Image NaiveCompose(const Image& scene, const SymbolString& prefix, const LayoutSpec& layout,
                   const GlyphFont& font);

// Ground-truth classifier. Expect() names the scene before a decode; each
// query must then show the independent composition of the true prefix for
// the current step, otherwise an inconsistency is counted and the canvas is
// re-identified by searching every registered scene and prefix length.
// Without an expectation the search is used directly.
class OracleClassifier : public Classifier {
 public:
  OracleClassifier(const Alphabet& alphabet, const LayoutSpec& layout, const GlyphFont& font)
      : alphabet_(alphabet), layout_(layout), font_(font) {}

  void Add(const LabeledScene& scene) { scenes_[scene.scene_id] = &scene; }
  void Expect(std::uint64_t scene_id);

  int class_count() const override { return alphabet_.class_count(); }
  std::vector<float> Scores(const Image& canvas) override;

  int calls() const { return calls_; }
  int inconsistencies() const { return inconsistencies_; }

 private:
  bool Matches(const LabeledScene& scene, int step, const Image& canvas) const;

  const Alphabet& alphabet_;
  const LayoutSpec& layout_;
  const GlyphFont& font_;
  std::map<std::uint64_t, const LabeledScene*> scenes_;
  const LabeledScene* current_ = nullptr;
  int step_ = 0;
  int calls_ = 0;
  int inconsistencies_ = 0;
};

}  // namespace superocr::oracle

#endif  // SUPEROCR_TESTS_ORACLES_HPP_
