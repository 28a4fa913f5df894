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


#ifndef SUPEROCR_TRAIN_HPP_
#define SUPEROCR_TRAIN_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "superocr/error.hpp"
#include "superocr/nn.hpp"
#include "superocr/supergen.hpp"

namespace superocr {

struct OptimConfig {
  double base_lr = 1e-4;
  double momentum = 0.9;
  double weight_decay = 7e-4;
  double lr_drop = 0.99;
  std::int64_t drop_interval = 5000;
  int batch_size = 32;
  std::int64_t max_iters = 60000;
  std::uint64_t seed = 1;

  void Validate() const;
};

// Iteration counter plus one velocity buffer per parameter tensor.
struct OptimState {
  std::int64_t iteration = 0;
  std::vector<Tensor> velocity;

  static OptimState For(const Network& net);
};

// base_lr * lr_drop^floor(iter / drop_interval)
double LrAt(const OptimConfig& cfg, std::int64_t iter);

// Classical momentum with weight decay folded into the gradient:
//   v <- momentum * v - lr * (g + weight_decay * w);  w <- w + v
// Nothing is modified if any gradient is non-finite.
void SgdStep(std::span<Tensor* const> params, std::span<const Tensor* const> grads,
             OptimState& state, const OptimConfig& cfg);
void SgdStep(Network& net, const std::vector<LayerParams>& grads, OptimState& state,
             const OptimConfig& cfg);

struct CurveRow {
  std::int64_t iter = 0;
  double loss = 0.0;
  double lr = 0.0;
  std::optional<double> val_acc;  // measured every val_interval iterations

  friend bool operator==(const CurveRow&, const CurveRow&) = default;
};

struct CurveLog {
  std::vector<CurveRow> rows;

  // "iter,loss,lr,val_acc"; val_acc is empty on rows without a measurement.
  std::string ToCsv() const;
  static CurveLog FromCsv(const std::string& text);
  friend bool operator==(const CurveLog&, const CurveLog&) = default;
};

struct TrainOptions {
  std::int64_t log_interval = 100;
  std::int64_t val_interval = 5000;
  // Threads per mini-batch. Gradients are reduced in worker order, so the
  // result is reproducible for a given worker count.
  int workers = 1;
  // Called after every logged row.
  std::function<void(const CurveRow&)> on_row;
};

struct TrainResult {
  Network final_net;
  Network best_net;  // highest validation accuracy (final_net if no validation)
  double best_val_acc = -1.0;
  CurveLog curve;
};

// Raised when the loss or a gradient becomes non-finite; carries the last
// parameters that produced a finite step.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(std::int64_t iteration, Network last_good)
      : Error(ErrorKind::kNumeric,
              "training diverged at iteration " + std::to_string(iteration)),
        iteration_(iteration),
        last_good_(std::move(last_good)) {}

  std::int64_t iteration() const { return iteration_; }
  const Network& last_good() const { return last_good_; }

 private:
  std::int64_t iteration_;
  Network last_good_;
};

// Mini-batch SGD over a seeded per-epoch shuffle of `train`.
TrainResult TrainLoop(const SampleArchive& train, Network net, const OptimConfig& cfg,
                      const SampleArchive* val, const TrainOptions& options = {});

// Fraction of samples whose argmax equals the target, plus the same per class.
struct ClassAccuracy {
  double overall = 0.0;
  std::vector<double> per_class;
};
ClassAccuracy ArchiveAccuracy(const Network& net, const SampleArchive& archive);

// Checkpoint: "SOCM", version u8, class_count u16, record count u8, then per
// record a kind byte, its u16 dims and its f32 parameters (little-endian).
// Record 0 has kind 0 and holds the input shape (C,H,W).
std::vector<std::uint8_t> SerializeCheckpoint(const Network& net);
Network DeserializeCheckpoint(std::span<const std::uint8_t> bytes);
void SaveCheckpoint(const Network& net, const std::string& path);
Network LoadCheckpoint(const std::string& path);

}  // namespace superocr

#endif  // SUPEROCR_TRAIN_HPP_
