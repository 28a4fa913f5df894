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


#include "superocr/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <thread>

#include "superocr/bytes.hpp"
#include "superocr/rng.hpp"

namespace superocr {

namespace {

constexpr std::uint8_t kCheckpointVersion = 1;
constexpr std::uint64_t kShuffleStream = 0x5348554646;  // "SHUFF"

bool AllFinite(std::span<const float> v) {
  for (float x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::vector<std::size_t> EpochOrder(std::size_t n, std::uint64_t seed, std::uint64_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed, epoch, kShuffleStream);
  for (std::size_t i = n; i > 1; --i) {
    auto j = static_cast<std::size_t>(rng.UniformInt(0, static_cast<std::int64_t>(i) - 1));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

Tensor SampleTensor(const SampleArchive& archive, std::size_t i) {
  const int c = archive.channels(), h = archive.height(), w = archive.width();
  Tensor t({c, h, w});
  const auto px = archive.pixels(i);
  const int hw = h * w;
  for (int ch = 0; ch < c; ++ch) {
    for (int p = 0; p < hw; ++p) {
      t[static_cast<std::size_t>(ch) * hw + p] =
          (static_cast<float>(px[static_cast<std::size_t>(p) * c + ch]) / 255.0f - kInputMean) /
          kInputStd;
    }
  }
  return t;
}

void AddInto(std::vector<LayerParams>& dst, const std::vector<LayerParams>& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) {
    for (std::size_t k = 0; k < dst[i].weight.size(); ++k) dst[i].weight[k] += src[i].weight[k];
    for (std::size_t k = 0; k < dst[i].bias.size(); ++k) dst[i].bias[k] += src[i].bias[k];
  }
}

}  // namespace

void OptimConfig::Validate() const {
  Require(base_lr > 0, ErrorKind::kInvalidArgument, "base_lr must be > 0");
  Require(momentum >= 0 && momentum < 1, ErrorKind::kInvalidArgument, "momentum must be in [0,1)");
  Require(weight_decay >= 0, ErrorKind::kInvalidArgument, "weight_decay must be >= 0");
  Require(lr_drop > 0 && lr_drop <= 1, ErrorKind::kInvalidArgument, "lr_drop must be in (0,1]");
  Require(drop_interval >= 1, ErrorKind::kInvalidArgument, "drop_interval must be >= 1");
  Require(batch_size >= 1, ErrorKind::kInvalidArgument, "batch_size must be >= 1");
  Require(max_iters >= 0, ErrorKind::kInvalidArgument, "max_iters must be >= 0");
}

OptimState OptimState::For(const Network& net) {
  OptimState s;
  for (const Tensor* p : net.ParameterTensors()) s.velocity.emplace_back(p->shape());
  return s;
}

double LrAt(const OptimConfig& cfg, std::int64_t iter) {
  Require(iter >= 0, ErrorKind::kInvalidArgument, "iteration must be >= 0");
  return cfg.base_lr * std::pow(cfg.lr_drop, static_cast<double>(iter / cfg.drop_interval));
}

void SgdStep(std::span<Tensor* const> params, std::span<const Tensor* const> grads,
             OptimState& state, const OptimConfig& cfg) {
  Require(params.size() == grads.size() && params.size() == state.velocity.size(),
          ErrorKind::kShape, "parameter, gradient and velocity lists differ in length");
  for (std::size_t i = 0; i < params.size(); ++i) {
    Require(params[i]->shape() == grads[i]->shape() &&
                params[i]->shape() == state.velocity[i].shape(),
            ErrorKind::kShape, "gradient shape does not match parameter " + std::to_string(i));
    if (!AllFinite(grads[i]->values())) {
      Fail(ErrorKind::kNumeric, "non-finite gradient for parameter " + std::to_string(i));
    }
  }
  const auto lr = static_cast<float>(LrAt(cfg, state.iteration));
  const auto mom = static_cast<float>(cfg.momentum);
  const auto wd = static_cast<float>(cfg.weight_decay);
  for (std::size_t i = 0; i < params.size(); ++i) {
    float* w = params[i]->data();
    const float* g = grads[i]->data();
    float* v = state.velocity[i].data();
    for (std::size_t k = 0; k < params[i]->size(); ++k) {
      v[k] = mom * v[k] - lr * (g[k] + wd * w[k]);
      w[k] += v[k];
    }
  }
  ++state.iteration;
}

void SgdStep(Network& net, const std::vector<LayerParams>& grads, OptimState& state,
             const OptimConfig& cfg) {
  std::vector<const Tensor*> g;
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    if (!net.layers()[i].parametric()) continue;
    g.push_back(&grads[i].weight);
    g.push_back(&grads[i].bias);
  }
  SgdStep(net.ParameterTensors(), g, state, cfg);
}

std::string CurveLog::ToCsv() const {
  std::string out = "iter,loss,lr,val_acc\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%lld,%.9g,%.9g,", static_cast<long long>(r.iter), r.loss,
                  r.lr);
    out += buf;
    if (r.val_acc) {
      std::snprintf(buf, sizeof(buf), "%.9g", *r.val_acc);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

CurveLog CurveLog::FromCsv(const std::string& text) {
  CurveLog log;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "iter,loss,lr,val_acc") {
    Fail(ErrorKind::kFormat, "curve CSV header missing");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 4) Fail(ErrorKind::kFormat, "bad curve CSV row: " + line);
    CurveRow r;
    r.iter = std::stoll(f[0]);
    r.loss = std::stod(f[1]);
    r.lr = std::stod(f[2]);
    if (!f[3].empty()) r.val_acc = std::stod(f[3]);
    log.rows.push_back(r);
  }
  return log;
}

ClassAccuracy ArchiveAccuracy(const Network& net, const SampleArchive& archive) {
  Require(!archive.empty(), ErrorKind::kInvalidArgument, "empty archive");
  std::vector<std::size_t> hit(archive.class_count(), 0), total(archive.class_count(), 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < archive.size(); ++i) {
    const Tensor logits = net.Forward(SampleTensor(archive, i));
    const int pred = static_cast<int>(
        std::max_element(logits.values().begin(), logits.values().end()) - logits.values().begin());
    const int t = archive.target(i);
    ++total[t];
    if (pred == t) {
      ++hit[t];
      ++correct;
    }
  }
  ClassAccuracy acc;
  acc.overall = static_cast<double>(correct) / static_cast<double>(archive.size());
  for (int c = 0; c < archive.class_count(); ++c) {
    acc.per_class.push_back(total[c] ? static_cast<double>(hit[c]) / total[c] : 0.0);
  }
  return acc;
}

TrainResult TrainLoop(const SampleArchive& train, Network net, const OptimConfig& cfg,
                      const SampleArchive* val, const TrainOptions& options) {
  cfg.Validate();
  Require(!train.empty(), ErrorKind::kInvalidArgument, "training archive is empty");
  Require(train.class_count() == net.class_count(), ErrorKind::kInvalidArgument,
          "archive class count does not match the network");
  Require(std::vector<int>{train.channels(), train.height(), train.width()} == net.input_shape(),
          ErrorKind::kShape, "archive geometry does not match the network input");
  if (val) {
    Require(val->class_count() == net.class_count() && !val->empty(),
            ErrorKind::kInvalidArgument, "validation archive does not match the network");
  }
  const int workers = std::max(1, std::min(options.workers, cfg.batch_size));

  TrainResult result;
  OptimState state = OptimState::For(net);
  std::uint64_t epoch = 0;
  std::vector<std::size_t> order = EpochOrder(train.size(), cfg.seed, epoch);
  std::size_t cursor = 0;
  std::vector<std::vector<LayerParams>> worker_grads(workers, net.ZeroGrads());
  std::vector<double> worker_loss(workers);
  double window_loss = 0.0;
  std::int64_t window_n = 0;
  Network last_good = net;

  for (std::int64_t it = 0; it < cfg.max_iters; ++it) {
    std::vector<std::size_t> batch(cfg.batch_size);
    for (auto& b : batch) {
      if (cursor == order.size()) {
        order = EpochOrder(train.size(), cfg.seed, ++epoch);
        cursor = 0;
      }
      b = order[cursor++];
    }

    auto run = [&](int w) {
      auto& g = worker_grads[w];
      for (auto& p : g) {
        p.weight.Fill(0.0f);
        p.bias.Fill(0.0f);
      }
      double loss = 0.0;
      const std::size_t lo = batch.size() * w / workers;
      const std::size_t hi = batch.size() * (w + 1) / workers;
      for (std::size_t i = lo; i < hi; ++i) {
        loss += net.ForwardBackward(SampleTensor(train, batch[i]), train.target(batch[i]), g);
      }
      worker_loss[w] = loss;
    };
    if (workers == 1) {
      run(0);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
      for (auto& t : pool) t.join();
    }
    double batch_loss = 0.0;
    for (int w = 0; w < workers; ++w) batch_loss += worker_loss[w];
    for (int w = 1; w < workers; ++w) AddInto(worker_grads[0], worker_grads[w]);
    const float inv = 1.0f / static_cast<float>(cfg.batch_size);
    for (auto& p : worker_grads[0]) {
      for (auto& v : p.weight.values()) v *= inv;
      for (auto& v : p.bias.values()) v *= inv;
    }
    batch_loss /= cfg.batch_size;

    if (!std::isfinite(batch_loss)) throw TrainingDiverged(it, std::move(last_good));
    try {
      SgdStep(net, worker_grads[0], state, cfg);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kNumeric) throw TrainingDiverged(it, std::move(last_good));
      throw;
    }
    bool params_finite = true;
    for (const Tensor* p : net.ParameterTensors()) params_finite = params_finite && AllFinite(p->values());
    if (!params_finite) throw TrainingDiverged(it, std::move(last_good));
    last_good = net;

    window_loss += batch_loss;
    ++window_n;
    const std::int64_t done = it + 1;
    const bool log_now = done % options.log_interval == 0 || done == cfg.max_iters;
    const bool val_now =
        val && (done % options.val_interval == 0 || done == cfg.max_iters);
    if (log_now || val_now) {
      CurveRow row;
      row.iter = done;
      row.loss = window_loss / static_cast<double>(window_n);
      row.lr = LrAt(cfg, it);
      if (val_now) {
        row.val_acc = ArchiveAccuracy(net, *val).overall;
        if (*row.val_acc > result.best_val_acc) {
          result.best_val_acc = *row.val_acc;
          result.best_net = net;
        }
      }
      window_loss = 0.0;
      window_n = 0;
      result.curve.rows.push_back(row);
      if (options.on_row) options.on_row(row);
    }
  }
  if (result.best_val_acc < 0) result.best_net = net;
  result.final_net = std::move(net);
  return result;
}

std::vector<std::uint8_t> SerializeCheckpoint(const Network& net) {
  Require(net.layers().size() + 1 <= 255, ErrorKind::kInvalidArgument,
          "too many layers for the checkpoint format");
  ByteWriter w;
  w.Tag("SOCM");
  w.U8(kCheckpointVersion);
  w.U16(static_cast<std::uint16_t>(net.class_count()));
  w.U8(static_cast<std::uint8_t>(net.layers().size() + 1));
  w.U8(0);
  for (int d : net.input_shape()) w.U16(static_cast<std::uint16_t>(d));
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    const LayerSpec& l = net.layers()[i];
    const std::vector<int>& in = net.in_shape(i);
    w.U8(static_cast<std::uint8_t>(l.kind));
    switch (l.kind) {
      case LayerKind::kConv2d:
        for (int d : {l.out_channels, in[0], l.kernel, l.stride, l.pad})
          w.U16(static_cast<std::uint16_t>(d));
        break;
      case LayerKind::kMaxPool:
        w.U16(static_cast<std::uint16_t>(l.kernel));
        w.U16(static_cast<std::uint16_t>(l.stride));
        break;
      case LayerKind::kFc:
        w.U16(static_cast<std::uint16_t>(l.out_dim));
        w.U16(static_cast<std::uint16_t>(in[0]));
        break;
      default:
        break;
    }
    if (l.parametric()) {
      for (float v : net.params()[i].weight.values()) w.F32(v);
      for (float v : net.params()[i].bias.values()) w.F32(v);
    }
  }
  return w.Take();
}

Network DeserializeCheckpoint(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (!r.Tag("SOCM")) Fail(ErrorKind::kFormat, "not a checkpoint (bad magic)");
  const std::uint8_t version = r.U8();
  if (version != kCheckpointVersion) {
    Fail(ErrorKind::kFormat, "unsupported checkpoint version " + std::to_string(version));
  }
  const int classes = r.U16();
  const int records = r.U8();
  if (records < 1 || r.U8() != 0) Fail(ErrorKind::kFormat, "checkpoint lacks an input record");
  std::vector<int> input = {r.U16(), r.U16(), r.U16()};
  std::vector<LayerSpec> layers;
  struct Pending {
    std::vector<float> w, b;
  };
  std::vector<Pending> payload;
  std::vector<int> shape = input;
  for (int i = 1; i < records; ++i) {
    const auto kind = static_cast<LayerKind>(r.U8());
    Pending pend;
    switch (kind) {
      case LayerKind::kConv2d: {
        const int o = r.U16(), c = r.U16(), k = r.U16(), s = r.U16(), p = r.U16();
        if (shape.size() != 3 || c != shape[0]) Fail(ErrorKind::kFormat, "conv record mismatch");
        layers.push_back(LayerSpec::Conv(o, k, s, p));
        const std::size_t nw = static_cast<std::size_t>(o) * c * k * k;
        if (!o || !k || !s) Fail(ErrorKind::kFormat, "bad conv record");
        pend.w.resize(nw);
        pend.b.resize(o);
        for (auto& v : pend.w) v = r.F32();
        for (auto& v : pend.b) v = r.F32();
        shape = {o, (shape[1] + 2 * p - k) / s + 1, (shape[2] + 2 * p - k) / s + 1};
        break;
      }
      case LayerKind::kRelu:
        layers.push_back(LayerSpec::Relu());
        break;
      case LayerKind::kMaxPool: {
        const int k = r.U16(), s = r.U16();
        if (!k || !s || shape.size() != 3) Fail(ErrorKind::kFormat, "bad maxpool record");
        layers.push_back(LayerSpec::MaxPool(k, s));
        shape = {shape[0], (shape[1] - k) / s + 1, (shape[2] - k) / s + 1};
        break;
      }
      case LayerKind::kFlatten:
        layers.push_back(LayerSpec::Flatten());
        shape = {static_cast<int>(ShapeNumel(shape))};
        break;
      case LayerKind::kFc: {
        const int o = r.U16(), in = r.U16();
        if (shape.size() != 1 || in != shape[0] || !o) Fail(ErrorKind::kFormat, "fc record mismatch");
        layers.push_back(LayerSpec::Fc(o));
        pend.w.resize(static_cast<std::size_t>(o) * in);
        pend.b.resize(o);
        for (auto& v : pend.w) v = r.F32();
        for (auto& v : pend.b) v = r.F32();
        shape = {o};
        break;
      }
      default:
        Fail(ErrorKind::kFormat, "unknown layer kind");
    }
    payload.push_back(std::move(pend));
  }
  if (!r.done()) Fail(ErrorKind::kFormat, "trailing bytes after checkpoint");
  Network net;
  try {
    net = Network(input, layers, classes);
  } catch (const Error& e) {
    Fail(ErrorKind::kFormat, std::string("inconsistent checkpoint: ") + e.what());
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (!layers[i].parametric()) continue;
    auto& p = net.params()[i];
    std::copy(payload[i].w.begin(), payload[i].w.end(), p.weight.values().begin());
    std::copy(payload[i].b.begin(), payload[i].b.end(), p.bias.values().begin());
  }
  return net;
}

void SaveCheckpoint(const Network& net, const std::string& path) {
  WriteFileBytes(path, SerializeCheckpoint(net));
}

Network LoadCheckpoint(const std::string& path) {
  return DeserializeCheckpoint(ReadFileBytes(path));
}

}  // namespace superocr
