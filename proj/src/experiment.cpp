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


#include "superocr/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "superocr/digest.hpp"
#include "superocr/error.hpp"

namespace superocr {
namespace fs = std::filesystem;

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& v) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  Require(ec == std::errc() && p == v.data() + v.size(), ErrorKind::kInvalidArgument,
          "bad value for " + key + ": '" + v + "'");
  return out;
}

template <typename T>
std::string Num(T v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

// One entry per key: a setter from text and a getter to text.
struct Field {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
Field NumField(const std::string& key, T ExperimentConfig::*member) {
  return {[key, member](ExperimentConfig& c, const std::string& v) {
            c.*member = ParseNumber<T>(key, v);
          },
          [member](const ExperimentConfig& c) { return Num(c.*member); }};
}

template <typename T>
Field OptimField(const std::string& key, T OptimConfig::*member) {
  return {[key, member](ExperimentConfig& c, const std::string& v) {
            c.optim.*member = ParseNumber<T>(key, v);
          },
          [member](const ExperimentConfig& c) { return Num(c.optim.*member); }};
}

Field StrField(std::string ExperimentConfig::*member) {
  return {[member](ExperimentConfig& c, const std::string& v) { c.*member = v; },
          [member](const ExperimentConfig& c) { return c.*member; }};
}

const std::vector<std::pair<std::string, Field>>& Fields() {
  static const std::vector<std::pair<std::string, Field>> fields = {
      {"seed", NumField("seed", &ExperimentConfig::seed)},
      {"alphabet", StrField(&ExperimentConfig::alphabet)},
      {"string_len", NumField("string_len", &ExperimentConfig::string_len)},
      {"scene_w", NumField("scene_w", &ExperimentConfig::scene_w)},
      {"scene_h", NumField("scene_h", &ExperimentConfig::scene_h)},
      {"layout", StrField(&ExperimentConfig::layout)},
      {"arch", StrField(&ExperimentConfig::arch)},
      {"train_subset", StrField(&ExperimentConfig::train_subset)},
      {"train_scenes", NumField("train_scenes", &ExperimentConfig::train_scenes)},
      {"val_scenes", NumField("val_scenes", &ExperimentConfig::val_scenes)},
      {"test_scenes", NumField("test_scenes", &ExperimentConfig::test_scenes)},
      {"calib_samples", NumField("calib_samples", &ExperimentConfig::calib_samples)},
      {"base_lr", OptimField("base_lr", &OptimConfig::base_lr)},
      {"momentum", OptimField("momentum", &OptimConfig::momentum)},
      {"weight_decay", OptimField("weight_decay", &OptimConfig::weight_decay)},
      {"lr_drop", OptimField("lr_drop", &OptimConfig::lr_drop)},
      {"drop_interval", OptimField("drop_interval", &OptimConfig::drop_interval)},
      {"batch_size", OptimField("batch_size", &OptimConfig::batch_size)},
      {"max_iters", OptimField("max_iters", &OptimConfig::max_iters)},
      {"log_interval", NumField("log_interval", &ExperimentConfig::log_interval)},
      {"val_interval", NumField("val_interval", &ExperimentConfig::val_interval)},
      {"workers", NumField("workers", &ExperimentConfig::workers)},
  };
  return fields;
}

}  // namespace

ExperimentConfig ExperimentConfig::Parse(const std::string& text) {
  ExperimentConfig cfg;
  bool have_seed = false;
  std::vector<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    Require(eq != std::string::npos, ErrorKind::kInvalidArgument,
            "config line " + std::to_string(lineno) + " is not key=value");
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    const auto& fields = Fields();
    auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return f.first == key; });
    Require(it != fields.end(), ErrorKind::kInvalidArgument, "unknown config key: " + key);
    Require(std::find(seen.begin(), seen.end(), key) == seen.end(), ErrorKind::kInvalidArgument,
            "duplicate config key: " + key);
    seen.push_back(key);
    it->second.set(cfg, value);
    have_seed |= key == "seed";
  }
  Require(have_seed, ErrorKind::kInvalidArgument, "config has no seed");
  cfg.optim.seed = cfg.seed;
  cfg.Validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::Load(const std::string& path) {
  std::ifstream in(path);
  Require(static_cast<bool>(in), ErrorKind::kInvalidArgument, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

std::string ExperimentConfig::ToText() const {
  std::string out;
  for (const auto& [key, field] : Fields()) out += key + "=" + field.get(*this) + "\n";
  return out;
}

void ExperimentConfig::Validate() const {
  MakeAlphabet();
  LayoutSpec l = Layout();
  l.Validate();
  Require(l.string_len() == string_len, ErrorKind::kInvalidArgument,
          "layout " + layout + " has " + std::to_string(l.slot_count()) +
              " slots; string_len must be slots + 1");
  Require(arch == "supernet_s", ErrorKind::kInvalidArgument, "unknown arch: " + arch);
  Require(train_scenes >= 1 && val_scenes >= 1 && test_scenes >= 1 && calib_samples >= 1,
          ErrorKind::kInvalidArgument, "dataset sizes must be >= 1");
  Require(log_interval >= 1 && val_interval >= 0, ErrorKind::kInvalidArgument,
          "bad log or validation interval");
  Require(workers >= 1, ErrorKind::kInvalidArgument, "workers must be >= 1");
  Task().Validate();
  Subset(train_subset);
  optim.Validate();
}

TaskConfig ExperimentConfig::Task() const {
  TaskConfig t;
  t.alphabet = MakeAlphabet();
  t.string_len = string_len;
  t.scene_w = scene_w;
  t.scene_h = scene_h;
  t.seed = seed;
  return t;
}

Network ExperimentConfig::MakeNetwork() const {
  const LayoutSpec l = Layout();
  Network net = Network::SuperNetS(1, l.canvas_h, l.canvas_w, MakeAlphabet().class_count());
  net.InitHe(seed);
  return net;
}

TrainOptions ExperimentConfig::Options() const {
  TrainOptions o;
  o.log_interval = log_interval;
  o.val_interval = val_interval;
  o.workers = workers;
  return o;
}

std::map<std::string, std::string> ReadArtifactManifest(const std::string& out_dir) {
  std::map<std::string, std::string> out;
  std::ifstream in(fs::path(out_dir) / "artifacts.tsv");
  std::string line;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    Require(tab != std::string::npos, ErrorKind::kFormat, "malformed artifacts.tsv line");
    out[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return out;
}

std::string RecordArtifact(const std::string& out_dir, const std::string& name) {
  const fs::path p = fs::path(out_dir) / name;
  Require(fs::exists(p), ErrorKind::kIo, "artifact missing: " + p.string());
  const std::string hash = fs::is_directory(p) ? DatasetHash(p.string()) : FileSha256(p.string());
  auto manifest = ReadArtifactManifest(out_dir);
  manifest[name] = hash;
  const fs::path tmp = fs::path(out_dir) / "artifacts.tsv.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    Require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + tmp.string());
    for (const auto& [k, v] : manifest) out << k << '\t' << v << '\n';
    Require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + tmp.string());
  }
  fs::rename(tmp, fs::path(out_dir) / "artifacts.tsv");
  return hash;
}

}  // namespace superocr
