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


#ifndef SUPEROCR_EVAL_HPP_
#define SUPEROCR_EVAL_HPP_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "superocr/alphabet.hpp"
#include "superocr/canvas.hpp"
#include "superocr/decoder.hpp"
#include "superocr/taskgen.hpp"
#include "superocr/train.hpp"

namespace superocr {

struct EvalCounts {
  std::size_t total_images = 0;
  std::size_t correct_images = 0;
  std::size_t total_chars = 0;
  std::size_t correct_chars = 0;

  void Merge(const EvalCounts& o) {
    total_images += o.total_images;
    correct_images += o.correct_images;
    total_chars += o.total_chars;
    correct_chars += o.correct_chars;
  }
  // Line correct rate and accuracy rate, in percent.
  double lcr() const;
  double ar() const;
  friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

struct EvalResult {
  EvalCounts overall;
  std::vector<std::pair<std::string, EvalCounts>> subsets;  // in evaluation order

  // Field-wise sum; subsets with the same name are combined.
  void Merge(const EvalResult& other);
};

// Count matches between equal-length prediction and label lists.
EvalCounts CountMatches(const std::vector<SymbolString>& preds,
                        const std::vector<SymbolString>& labels);

// Percentage of items whose whole string matches.
double SequenceAccuracy(const std::vector<SymbolString>& preds,
                        const std::vector<SymbolString>& labels);
// (LCR, AR) in percent.
std::pair<double, double> LcrAr(const std::vector<SymbolString>& preds,
                                const std::vector<SymbolString>& labels);

// Percent value with two decimals, half-up: Percent(1, 3) == "33.33".
std::string FormatPercent(std::size_t num, std::size_t den);

using SubsetMap = std::vector<std::pair<std::string, std::vector<LabeledScene>>>;

// Decodes every scene of every subset. `predictions`, if given, receives the
// decoded strings per subset in scene order.
EvalResult EvaluateSubsets(Classifier& clf, const SubsetMap& subsets, const LayoutSpec& layout,
                           const GlyphFont& font, const Alphabet& alphabet,
                           std::vector<std::vector<SymbolString>>* predictions = nullptr);

// metrics.csv rows: subset,images,seq_acc,lcr,ar (overall last).
std::string MetricsCsv(const EvalResult& result);
struct MetricsRow {
  std::string subset;
  std::size_t images = 0;
  std::string seq_acc, lcr, ar;
  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};
std::vector<MetricsRow> ParseMetricsCsv(const std::string& text);

// Line chart of training loss and validation accuracy against iteration.
std::string CurvesSvg(const CurveLog& curve);

// Writes metrics.csv, curves.csv and curves.svg into out_dir.
void EmitReport(const EvalResult& result, const CurveLog& curve, const std::string& out_dir);

}  // namespace superocr

#endif  // SUPEROCR_EVAL_HPP_
