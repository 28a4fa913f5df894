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


#include "superocr/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "superocr/digest.hpp"
#include "superocr/error.hpp"
#include "superocr/rng.hpp"

namespace superocr {

namespace fs = std::filesystem;

namespace {

// Independent sub-streams per scene.
enum Stream : std::uint64_t { kLabelStream = 1, kPlacementStream = 2, kDistortStream = 3 };

std::uint8_t ClampRound(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

// Bilinear read where each tap outside the source contributes `fill`.
double SampleFill(const Image& src, double sx, double sy, int c, double fill) {
  const int x0 = static_cast<int>(std::floor(sx));
  const int y0 = static_cast<int>(std::floor(sy));
  const double fx = sx - x0;
  const double fy = sy - y0;
  auto tap = [&](int x, int y) -> double {
    if (x < 0 || y < 0 || x >= src.width() || y >= src.height()) return fill;
    return src.at(x, y, c);
  };
  const double top = tap(x0, y0) * (1.0 - fx) + tap(x0 + 1, y0) * fx;
  const double bot = tap(x0, y0 + 1) * (1.0 - fx) + tap(x0 + 1, y0 + 1) * fx;
  return top * (1.0 - fy) + bot * fy;
}

Image Shear(const Image& src, double k, std::uint8_t fill) {
  if (k == 0.0) return src;
  Image out(src.width(), src.height(), src.channels());
  const double cy = src.height() / 2.0;
  for (int y = 0; y < src.height(); ++y) {
    const double shift = k * (y + 0.5 - cy);
    for (int x = 0; x < src.width(); ++x) {
      for (int c = 0; c < src.channels(); ++c) {
        out.at(x, y, c) = ClampRound(SampleFill(src, x - shift, y, c, fill));
      }
    }
  }
  return out;
}

}  // namespace

void TaskConfig::Validate() const {
  Require(string_len >= 1, ErrorKind::kInvalidArgument, "string_len must be >= 1");
  Require(scene_w >= 1 && scene_h >= 1, ErrorKind::kInvalidArgument,
          "scene dimensions must be positive");
  Require(glyph_scale_lo > 0 && glyph_scale_lo <= glyph_scale_hi,
          ErrorKind::kInvalidArgument, "bad glyph scale range");
  Require(glyph_stretch > 0, ErrorKind::kInvalidArgument, "glyph_stretch must be > 0");
  Require(rotation_deg >= 0 && rotation_deg <= 90, ErrorKind::kInvalidArgument,
          "rotation range must be within [0, 90]");
  Require(shear >= 0, ErrorKind::kInvalidArgument, "shear range must be >= 0");
  Require(brightness_lo <= brightness_hi, ErrorKind::kInvalidArgument,
          "bad brightness range");
  Require(fog_max >= 0 && fog_max <= 1, ErrorKind::kInvalidArgument,
          "fog must be within [0, 1]");
  Require(noise_sigma >= 0, ErrorKind::kInvalidArgument, "noise_sigma must be >= 0");
  Require(placement_jitter >= 0, ErrorKind::kInvalidArgument,
          "placement_jitter must be >= 0");
  Require(alphabet.class_count() > 0, ErrorKind::kInvalidArgument, "empty alphabet");
}

const std::vector<std::string>& SubsetNames() {
  static const std::vector<std::string> names = {"clean", "rotate", "tilt",
                                                 "weather", "db", "fn"};
  return names;
}

TaskConfig SubsetConfig(const std::string& subset, const TaskConfig& base) {
  TaskConfig cfg = base;
  cfg.glyph_scale_lo = 2.8;
  cfg.glyph_scale_hi = 3.0;
  cfg.glyph_stretch = 1.8;
  cfg.rotation_deg = 3.0;
  cfg.shear = 0.0;
  cfg.brightness_lo = -25.0;
  cfg.brightness_hi = 25.0;
  cfg.fog_max = 0.0;
  cfg.noise_sigma = 4.0;
  cfg.placement_jitter = 1;
  if (subset == "clean") {
  } else if (subset == "train") {
    // Training pool: clean scenes with the full rotation range.
    cfg.rotation_deg = 15.0;
  } else if (subset == "rotate") {
    cfg.rotation_deg = 15.0;
  } else if (subset == "tilt") {
    cfg.shear = 0.3;
  } else if (subset == "weather") {
    cfg.noise_sigma = 18.0;
    cfg.fog_max = 0.5;
  } else if (subset == "db") {
    cfg.brightness_lo = -100.0;
    cfg.brightness_hi = 100.0;
  } else if (subset == "fn") {
    cfg.glyph_scale_lo = 2.0;
    cfg.glyph_scale_hi = 3.2;
  } else {
    Fail(ErrorKind::kInvalidArgument, "unknown subset: " + subset);
  }
  cfg.seed = MixSeed(base.seed, HashName(subset));
  return cfg;
}

Image Rotate(const Image& src, double degrees, std::uint8_t fill) {
  Require(std::abs(degrees) <= 90.0, ErrorKind::kInvalidArgument,
          "rotation angle must be within [-90, 90]");
  if (degrees == 0.0) return src;
  Image out(src.width(), src.height(), src.channels());
  const double rad = degrees * std::numbers::pi / 180.0;
  const double cs = std::cos(rad);
  const double sn = std::sin(rad);
  const double cx = src.width() / 2.0;
  const double cy = src.height() / 2.0;
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      const double dx = x + 0.5 - cx;
      const double dy = y + 0.5 - cy;
      // Inverse rotation of the destination pixel center.
      const double sx = cs * dx + sn * dy + cx - 0.5;
      const double sy = -sn * dx + cs * dy + cy - 0.5;
      for (int c = 0; c < src.channels(); ++c) {
        out.at(x, y, c) = ClampRound(SampleFill(src, sx, sy, c, fill));
      }
    }
  }
  return out;
}

LabeledScene GenScene(const TaskConfig& cfg, std::uint64_t index) {
  cfg.Validate();
  const GlyphFont& font = GlyphFont::Builtin();
  LabeledScene scene;
  scene.scene_id = MixSeed(cfg.seed, index);

  Rng label_rng(cfg.seed, index, kLabelStream);
  const int k = cfg.alphabet.class_count();
  for (int i = 0; i < cfg.string_len; ++i) {
    scene.label.push_back(cfg.alphabet.symbol(
        static_cast<int>(label_rng.UniformInt(0, k - 1))));
  }

  Rng place(cfg.seed, index, kPlacementStream);
  Image img(cfg.scene_w, cfg.scene_h, 1, cfg.background);
  if (cfg.textured) {
    const double phase = place.Uniform(0.0, 2.0 * std::numbers::pi);
    const double freq = place.Uniform(0.05, 0.15);
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        img.at(x, y) = ClampRound(cfg.background +
                                  18.0 * std::sin(freq * (x + 0.7 * y) + phase));
      }
    }
  }

  // Glyph box of the string at a sampled scale, shrunk to fit if needed.
  double s = place.Uniform(cfg.glyph_scale_lo, cfg.glyph_scale_hi);
  const int n = cfg.string_len;
  const int cw = font.cell_w();
  const int chh = font.cell_h();
  auto extent = [&](double scale, int& gw, int& gh, int& gap) {
    gw = std::max(1, static_cast<int>(std::lround(cw * scale)));
    gh = std::max(1, static_cast<int>(std::lround(chh * scale * cfg.glyph_stretch)));
    gap = std::max(1, static_cast<int>(std::lround(scale)));
    return n * gw + (n - 1) * gap;
  };
  int gw, gh, gap;
  int total_w = extent(s, gw, gh, gap);
  while ((total_w > cfg.scene_w || gh > cfg.scene_h) && s > 0.2) {
    s *= 0.95;
    total_w = extent(s, gw, gh, gap);
  }
  const int jx = static_cast<int>(place.UniformInt(-cfg.placement_jitter, cfg.placement_jitter));
  const int jy = static_cast<int>(place.UniformInt(-cfg.placement_jitter, cfg.placement_jitter));
  const int x0 = std::clamp((cfg.scene_w - total_w) / 2 + jx, 0,
                            std::max(0, cfg.scene_w - total_w));
  const int y0 = std::clamp((cfg.scene_h - gh) / 2 + jy, 0,
                            std::max(0, cfg.scene_h - gh));
  for (int i = 0; i < n; ++i) {
    const auto& bits = font.Bits(scene.label[i]);
    const int gx = x0 + i * (gw + gap);
    for (int y = 0; y < gh; ++y) {
      for (int x = 0; x < gw; ++x) {
        const int px = gx + x;
        const int py = y0 + y;
        if (px >= cfg.scene_w || py >= cfg.scene_h) continue;
        if (bits[(y * chh / gh) * cw + x * cw / gw]) img.at(px, py) = cfg.ink;
      }
    }
  }

  Rng distort(cfg.seed, index, kDistortStream);
  const double k_shear = distort.Uniform(-cfg.shear, cfg.shear);
  const double angle = distort.Uniform(-cfg.rotation_deg, cfg.rotation_deg);
  const double fog = distort.Uniform(0.0, cfg.fog_max);
  const double bright = distort.Uniform(cfg.brightness_lo, cfg.brightness_hi);
  img = Shear(img, k_shear, cfg.background);
  img = Rotate(img, angle, cfg.background);
  for (auto& p : img.pixels()) {
    double v = p;
    v += fog * (255.0 - v);
    v += bright;
    if (cfg.noise_sigma > 0) v += cfg.noise_sigma * distort.Gaussian();
    p = ClampRound(v);
  }
  scene.image = std::move(img);
  return scene;
}

std::vector<LabeledScene> GenSplit(const TaskConfig& cfg, std::size_t count,
                                   std::uint64_t offset, int workers) {
  Require(count >= 1, ErrorKind::kInvalidArgument, "split count must be >= 1");
  cfg.Validate();
  std::vector<LabeledScene> out(count);
  workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = GenScene(cfg, offset + i);
    return out;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) out[i] = GenScene(cfg, offset + i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

std::string SceneIdHex(std::uint64_t id) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(id));
  return buf;
}

void WriteDataset(const std::string& dir, const std::vector<LabeledScene>& scenes) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) Fail(ErrorKind::kIo, "cannot create directory " + dir + ": " + ec.message());
  std::ofstream manifest(fs::path(dir) / "manifest.tsv", std::ios::binary);
  if (!manifest) Fail(ErrorKind::kIo, "cannot write manifest in " + dir);
  for (const auto& s : scenes) {
    const std::string name = "scene_" + SceneIdHex(s.scene_id) + ".pgm";
    WritePnm(s.image, (fs::path(dir) / name).string());
    manifest << name << '\t' << ToUtf8(s.label) << '\n';
  }
  if (!manifest) Fail(ErrorKind::kIo, "manifest write failed in " + dir);
}

namespace {

std::uint64_t IdFromName(const std::string& name, std::size_t line_no) {
  const std::string stem = fs::path(name).stem().string();
  if (stem.rfind("scene_", 0) == 0 && stem.size() == 22) {
    try {
      return std::stoull(stem.substr(6), nullptr, 16);
    } catch (const std::exception&) {
    }
  }
  return line_no;
}

std::vector<std::pair<std::string, std::string>> ReadManifest(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "manifest.tsv", std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "no manifest.tsv in " + dir);
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) Fail(ErrorKind::kFormat, "manifest line without tab: " + line);
    rows.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return rows;
}

}  // namespace

std::vector<LabeledScene> ReadDataset(const std::string& dir) {
  std::vector<LabeledScene> scenes;
  std::size_t line_no = 0;
  for (const auto& [path, label] : ReadManifest(dir)) {
    LabeledScene s;
    s.image = ReadPnm((fs::path(dir) / path).string());
    s.label = FromUtf8(label);
    s.scene_id = IdFromName(path, line_no++);
    scenes.push_back(std::move(s));
  }
  return scenes;
}

std::string DatasetHash(const std::string& dir) {
  Sha256 h;
  std::ifstream in(fs::path(dir) / "manifest.tsv", std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "no manifest.tsv in " + dir);
  std::stringstream ss;
  ss << in.rdbuf();
  h.Update(ss.str());
  for (const auto& row : ReadManifest(dir)) {
    h.Update(FileSha256((fs::path(dir) / row.first).string()));
  }
  return h.HexDigest();
}

}  // namespace superocr
