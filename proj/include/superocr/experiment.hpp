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


#ifndef SUPEROCR_EXPERIMENT_HPP_
#define SUPEROCR_EXPERIMENT_HPP_

#include <cstdint>
#include <map>
#include <string>

#include "superocr/alphabet.hpp"
#include "superocr/canvas.hpp"
#include "superocr/nn.hpp"
#include "superocr/taskgen.hpp"
#include "superocr/train.hpp"

namespace superocr {

// Everything one experiment needs, stored as a flat key=value text file.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string alphabet = "hex16";
  int string_len = 5;
  int scene_w = 96;
  int scene_h = 48;
  std::string layout = "desk";
  std::string arch = "supernet_s";
  std::string train_subset = "train";
  std::int64_t train_scenes = 20000;
  std::int64_t val_scenes = 500;
  std::int64_t test_scenes = 1000;
  std::int64_t calib_samples = 64;
  OptimConfig optim;
  std::int64_t log_interval = 100;
  std::int64_t val_interval = 5000;
  int workers = 1;

  // Unknown keys, malformed values and a missing seed raise kInvalidArgument.
  static ExperimentConfig Parse(const std::string& text);
  static ExperimentConfig Load(const std::string& path);
  // Canonical text: every key, fixed order.
  std::string ToText() const;
  void Validate() const;

  TaskConfig Task() const;
  TaskConfig Subset(const std::string& name) const { return SubsetConfig(name, Task()); }
  LayoutSpec Layout() const { return LayoutSpec::ByName(layout); }
  Alphabet MakeAlphabet() const { return Alphabet::ByName(alphabet); }
  Network MakeNetwork() const;
  TrainOptions Options() const;
};

// artifacts.tsv in `out_dir`: one "<name>\t<sha256>" line per artifact,
// sorted by name. Directories are hashed as dataset archives.
std::map<std::string, std::string> ReadArtifactManifest(const std::string& out_dir);
std::string RecordArtifact(const std::string& out_dir, const std::string& name);

}  // namespace superocr

#endif  // SUPEROCR_EXPERIMENT_HPP_
