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


#include "superocr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "superocr/bytes.hpp"
#include "superocr/error.hpp"

namespace superocr {

namespace fs = std::filesystem;

double EvalCounts::lcr() const {
  return total_images ? 100.0 * static_cast<double>(correct_images) / total_images : 0.0;
}

double EvalCounts::ar() const {
  return total_chars ? 100.0 * static_cast<double>(correct_chars) / total_chars : 0.0;
}

void EvalResult::Merge(const EvalResult& other) {
  overall.Merge(other.overall);
  for (const auto& [name, counts] : other.subsets) {
    auto it = std::find_if(subsets.begin(), subsets.end(),
                           [&](const auto& p) { return p.first == name; });
    if (it == subsets.end()) {
      subsets.emplace_back(name, counts);
    } else {
      it->second.Merge(counts);
    }
  }
}

EvalCounts CountMatches(const std::vector<SymbolString>& preds,
                        const std::vector<SymbolString>& labels) {
  Require(!preds.empty(), ErrorKind::kInvalidArgument, "no predictions to score");
  Require(preds.size() == labels.size(), ErrorKind::kInvalidArgument,
          "prediction and label counts differ");
  EvalCounts c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    Require(preds[i].size() == labels[i].size(), ErrorKind::kInvalidArgument,
            "prediction " + std::to_string(i) + " length differs from its label");
    std::size_t ok = 0;
    for (std::size_t k = 0; k < preds[i].size(); ++k) ok += preds[i][k] == labels[i][k];
    ++c.total_images;
    c.correct_images += ok == preds[i].size();
    c.total_chars += preds[i].size();
    c.correct_chars += ok;
  }
  return c;
}

double SequenceAccuracy(const std::vector<SymbolString>& preds,
                        const std::vector<SymbolString>& labels) {
  return CountMatches(preds, labels).lcr();
}

std::pair<double, double> LcrAr(const std::vector<SymbolString>& preds,
                                const std::vector<SymbolString>& labels) {
  const EvalCounts c = CountMatches(preds, labels);
  return {c.lcr(), c.ar()};
}

std::string FormatPercent(std::size_t num, std::size_t den) {
  if (den == 0) return "0.00";
  // Hundredths of a percent, rounded half-up in integer arithmetic.
  const unsigned long long scaled =
      (static_cast<unsigned long long>(num) * 20000ULL + den) / (2ULL * den);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%llu.%02llu", scaled / 100, scaled % 100);
  return buf;
}

EvalResult EvaluateSubsets(Classifier& clf, const SubsetMap& subsets, const LayoutSpec& layout,
                           const GlyphFont& font, const Alphabet& alphabet,
                           std::vector<std::vector<SymbolString>>* predictions) {
  Require(!subsets.empty(), ErrorKind::kInvalidArgument, "no subsets to evaluate");
  EvalResult result;
  if (predictions) predictions->clear();
  for (const auto& [name, scenes] : subsets) {
    Require(!scenes.empty(), ErrorKind::kInvalidArgument, "subset '" + name + "' is empty");
    std::vector<SymbolString> preds, labels;
    for (const auto& scene : scenes) {
      try {
        preds.push_back(
            Decode(scene.image, clf, layout, font, alphabet, layout.string_len()));
      } catch (const Error& e) {
        throw Error(e.kind(), "subset '" + name + "', scene " + SceneIdHex(scene.scene_id) +
                                  ": " + e.what());
      }
      labels.push_back(scene.label);
    }
    const EvalCounts c = CountMatches(preds, labels);
    result.subsets.emplace_back(name, c);
    result.overall.Merge(c);
    if (predictions) predictions->push_back(std::move(preds));
  }
  return result;
}

std::string MetricsCsv(const EvalResult& result) {
  std::string out = "subset,images,seq_acc,lcr,ar\n";
  auto row = [&](const std::string& name, const EvalCounts& c) {
    const std::string lcr = FormatPercent(c.correct_images, c.total_images);
    out += name + "," + std::to_string(c.total_images) + "," + lcr + "," + lcr + "," +
           FormatPercent(c.correct_chars, c.total_chars) + "\n";
  };
  for (const auto& [name, c] : result.subsets) row(name, c);
  row("overall", result.overall);
  return out;
}

std::vector<MetricsRow> ParseMetricsCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "subset,images,seq_acc,lcr,ar") {
    Fail(ErrorKind::kFormat, "metrics CSV header missing");
  }
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 5) Fail(ErrorKind::kFormat, "bad metrics row: " + line);
    rows.push_back(MetricsRow{f[0], std::stoull(f[1]), f[2], f[3], f[4]});
  }
  return rows;
}

std::string CurvesSvg(const CurveLog& curve) {
  constexpr double kW = 640, kH = 360, kMargin = 40;
  std::int64_t max_iter = 1;
  double max_loss = 1e-9;
  for (const auto& r : curve.rows) {
    max_iter = std::max(max_iter, r.iter);
    if (std::isfinite(r.loss)) max_loss = std::max(max_loss, r.loss);
  }
  auto x_of = [&](std::int64_t it) {
    return kMargin + (kW - 2 * kMargin) * static_cast<double>(it) / static_cast<double>(max_iter);
  };
  auto y_of = [&](double v01) { return kH - kMargin - (kH - 2 * kMargin) * v01; };
  std::string loss_pts, acc_pts;
  char buf[64];
  for (const auto& r : curve.rows) {
    if (std::isfinite(r.loss)) {
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", x_of(r.iter), y_of(r.loss / max_loss));
      loss_pts += buf;
    }
    if (r.val_acc) {
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", x_of(r.iter), y_of(*r.val_acc));
      acc_pts += buf;
    }
  }
  if (!loss_pts.empty()) loss_pts.pop_back();
  if (!acc_pts.empty()) acc_pts.pop_back();
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n"
      << "  <rect x=\"0\" y=\"0\" width=\"" << kW << "\" height=\"" << kH
      << "\" fill=\"white\"/>\n"
      << "  <line x1=\"" << kMargin << "\" y1=\"" << kH - kMargin << "\" x2=\"" << kW - kMargin
      << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\"/>\n"
      << "  <line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
      << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\"/>\n"
      << "  <text x=\"" << kMargin << "\" y=\"20\" font-size=\"12\">training loss (scaled to max "
      << max_loss << ") and validation accuracy vs iteration (max " << max_iter << ")</text>\n"
      << "  <polyline id=\"loss\" fill=\"none\" stroke=\"#c0392b\" points=\"" << loss_pts
      << "\"/>\n"
      << "  <polyline id=\"val_acc\" fill=\"none\" stroke=\"#2471a3\" points=\"" << acc_pts
      << "\"/>\n"
      << "</svg>\n";
  return svg.str();
}

void EmitReport(const EvalResult& result, const CurveLog& curve, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) Fail(ErrorKind::kIo, "cannot create " + out_dir + ": " + ec.message());
  auto write = [&](const char* name, const std::string& text) {
    WriteFileBytes((fs::path(out_dir) / name).string(),
                   std::span<const std::uint8_t>(
                       reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  };
  write("metrics.csv", MetricsCsv(result));
  write("curves.csv", curve.ToCsv());
  write("curves.svg", CurvesSvg(curve));
}

}  // namespace superocr
