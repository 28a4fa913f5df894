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


#include "superocr/quant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "superocr/bytes.hpp"
#include "superocr/error.hpp"
#include "superocr/train.hpp"

namespace superocr {

namespace {

constexpr char kQuantMagic[5] = "SOCQ";
constexpr std::uint8_t kQuantVersion = 1;

float ScaleFor(double max_abs) {
  return max_abs > 0.0 ? static_cast<float>(max_abs / 127.0) : 1.0f;
}

bool Positive(float s) { return std::isfinite(s) && s > 0.0f; }

std::vector<int> ConvOutShape(const std::vector<int>& in, const LayerSpec& s) {
  const int h = (in[1] + 2 * s.pad - s.kernel) / s.stride + 1;
  const int w = (in[2] + 2 * s.pad - s.kernel) / s.stride + 1;
  return {s.out_channels, h, w};
}

std::vector<int> PoolOutShape(const std::vector<int>& in, const LayerSpec& s) {
  return {in[0], (in[1] - s.kernel) / s.stride + 1, (in[2] - s.kernel) / s.stride + 1};
}

// Integer activation with its [C,H,W] shape.
struct IntAct {
  std::vector<int> shape;
  std::vector<std::int32_t> v;
};

IntAct ConvInt(const IntAct& x, const QuantLayer& layer) {
  const LayerSpec& s = layer.spec;
  const int c_in = x.shape[0], h = x.shape[1], w = x.shape[2];
  const std::vector<int> os = ConvOutShape(x.shape, s);
  const int oh = os[1], ow = os[2], k = s.kernel;
  IntAct y{os, std::vector<std::int32_t>(static_cast<std::size_t>(os[0]) * oh * ow)};
  std::vector<std::int32_t> acc(static_cast<std::size_t>(oh) * ow);
  for (int o = 0; o < os[0]; ++o) {
    std::fill(acc.begin(), acc.end(), layer.bias[o]);
    for (int c = 0; c < c_in; ++c) {
      const std::int32_t* plane = x.v.data() + static_cast<std::size_t>(c) * h * w;
      for (int u = 0; u < k; ++u) {
        for (int v = 0; v < k; ++v) {
          const std::int32_t wq =
              layer.weight.q[((static_cast<std::size_t>(o) * c_in + c) * k + u) * k + v];
          if (wq == 0) continue;
          for (int i = 0; i < oh; ++i) {
            const int yy = i * s.stride + u - s.pad;
            if (yy < 0 || yy >= h) continue;
            std::int32_t* arow = acc.data() + static_cast<std::size_t>(i) * ow;
            const std::int32_t* xrow = plane + static_cast<std::size_t>(yy) * w;
            for (int j = 0; j < ow; ++j) {
              const int xx = j * s.stride + v - s.pad;
              if (xx >= 0 && xx < w) arow[j] += wq * xrow[xx];
            }
          }
        }
      }
    }
    std::int32_t* out = y.v.data() + static_cast<std::size_t>(o) * oh * ow;
    for (std::size_t p = 0; p < acc.size(); ++p) out[p] = ApplyRequant(acc[p], layer.requant);
  }
  return y;
}

IntAct PoolInt(const IntAct& x, const LayerSpec& s) {
  const int c_n = x.shape[0], h = x.shape[1], w = x.shape[2];
  const std::vector<int> os = PoolOutShape(x.shape, s);
  IntAct y{os, std::vector<std::int32_t>(static_cast<std::size_t>(os[0]) * os[1] * os[2])};
  std::size_t idx = 0;
  for (int c = 0; c < c_n; ++c) {
    const std::int32_t* plane = x.v.data() + static_cast<std::size_t>(c) * h * w;
    for (int i = 0; i < os[1]; ++i) {
      for (int j = 0; j < os[2]; ++j) {
        std::int32_t m = std::numeric_limits<std::int32_t>::min();
        for (int u = 0; u < s.kernel; ++u) {
          for (int v = 0; v < s.kernel; ++v) {
            m = std::max(m, plane[(i * s.stride + u) * w + j * s.stride + v]);
          }
        }
        y.v[idx++] = m;
      }
    }
  }
  return y;
}

}  // namespace

Tensor QuantTensor::Dequantize() const {
  Tensor t(shape);
  auto vals = t.values();
  for (std::size_t i = 0; i < q.size(); ++i) vals[i] = static_cast<float>(q[i]) * scale;
  return t;
}

QuantTensor QuantizeTensor(const Tensor& x) {
  double max_abs = 0.0;
  for (float v : x.values()) {
    Require(std::isfinite(v), ErrorKind::kNumeric, "cannot quantize a non-finite tensor");
    max_abs = std::max(max_abs, static_cast<double>(std::fabs(v)));
  }
  QuantTensor out;
  out.shape = x.shape();
  out.scale = ScaleFor(max_abs);
  out.q.reserve(x.size());
  for (float v : x.values()) {
    const double r = std::nearbyint(static_cast<double>(v) / out.scale);
    out.q.push_back(static_cast<std::int8_t>(std::clamp(r, -127.0, 127.0)));
  }
  return out;
}

Requant MakeRequant(double factor) {
  Require(std::isfinite(factor) && factor >= 0.0, ErrorKind::kNumeric,
          "requantization factor must be finite and non-negative");
  if (factor == 0.0) return {};
  int exp = 0;
  const double frac = std::frexp(factor, &exp);  // factor = frac * 2^exp, frac in [0.5, 1)
  std::int64_t m = std::llround(frac * 2147483648.0);
  if (m == (std::int64_t{1} << 31)) {
    m >>= 1;
    ++exp;
  }
  const int shift = 31 - exp;
  Require(shift >= 0, ErrorKind::kNumeric, "requantization factor too large");
  if (shift > 62) return {};  // below int8 resolution for any 32-bit accumulator
  return {static_cast<std::int32_t>(m), shift};
}

std::int8_t ApplyRequant(std::int64_t acc, const Requant& r) {
  std::int64_t v = acc * r.multiplier;
  if (r.shift > 0) v = (v + (std::int64_t{1} << (r.shift - 1))) >> r.shift;
  return static_cast<std::int8_t>(std::clamp<std::int64_t>(v, -127, 127));
}

QuantNetwork::QuantNetwork(std::vector<int> input_shape, std::vector<QuantLayer> device,
                           Network tail)
    : input_shape_(std::move(input_shape)), device_(std::move(device)), tail_(std::move(tail)) {
  Require(input_shape_.size() == 3, ErrorKind::kShape, "input shape must be [C,H,W]");
  Require(!tail_.layers().empty() && tail_.layers()[0].kind == LayerKind::kFlatten,
          ErrorKind::kShape, "host tail must start at the flatten layer");
  std::vector<int> shape = input_shape_;
  for (const auto& layer : device_) {
    const LayerSpec& s = layer.spec;
    Require(Positive(layer.out_scale), ErrorKind::kShape, "activation scale must be positive");
    switch (s.kind) {
      case LayerKind::kConv2d: {
        const std::vector<int> ws = {s.out_channels, shape[0], s.kernel, s.kernel};
        Require(s.kernel >= 1 && s.stride >= 1 && s.pad >= 0, ErrorKind::kShape,
                "bad conv geometry");
        Require(layer.weight.shape == ws &&
                    layer.weight.q.size() == static_cast<std::size_t>(ShapeNumel(ws)),
                ErrorKind::kShape, "conv weight shape mismatch");
        Require(layer.bias.size() == static_cast<std::size_t>(s.out_channels),
                ErrorKind::kShape, "conv bias size mismatch");
        Require(Positive(layer.weight.scale), ErrorKind::kShape,
                "weight scale must be positive");
        shape = ConvOutShape(shape, s);
        break;
      }
      case LayerKind::kRelu:
        break;
      case LayerKind::kMaxPool:
        Require(s.kernel >= 1 && s.stride >= 1, ErrorKind::kShape, "bad pool geometry");
        shape = PoolOutShape(shape, s);
        break;
      default:
        Fail(ErrorKind::kShape, "device half holds only conv, relu and maxpool layers");
    }
    Require(shape[1] >= 1 && shape[2] >= 1, ErrorKind::kShape, "device layer output is empty");
  }
  Require(shape == tail_.input_shape(), ErrorKind::kShape,
          "device output " + ShapeString(shape) + " does not match tail input " +
              ShapeString(tail_.input_shape()));
}

std::size_t QuantNetwork::feature_count() const {
  return static_cast<std::size_t>(ShapeNumel(tail_.input_shape()));
}

float QuantNetwork::feature_scale() const {
  return device_.empty() ? kPixelInputScale : device_.back().out_scale;
}

QuantNetwork QuantizeModel(const Network& net, const std::vector<Image>& calib) {
  Require(!calib.empty(), ErrorKind::kInvalidArgument, "calibration set is empty");
  const std::size_t split = net.flatten_index();
  Require(split < net.layers().size(), ErrorKind::kInvalidArgument,
          "network has no flatten layer to split at");
  const auto& layers = net.layers();
  for (std::size_t i = 0; i < split; ++i) {
    Require(layers[i].kind == LayerKind::kConv2d || layers[i].kind == LayerKind::kRelu ||
                layers[i].kind == LayerKind::kMaxPool,
            ErrorKind::kInvalidArgument, "layer " + layers[i].ToString() + " cannot run on device");
  }

  // Largest activation magnitude seen after each layer.
  std::vector<double> max_abs(split, 0.0);
  for (const Image& img : calib) {
    Tensor a = ImageToTensor(img);
    Require(a.shape() == net.input_shape(), ErrorKind::kShape,
            "calibration image does not match the network input");
    for (std::size_t i = 0; i < split; ++i) {
      a = net.ForwardRange(a, i, i + 1);
      for (float v : a.values()) max_abs[i] = std::max(max_abs[i], static_cast<double>(std::fabs(v)));
    }
  }

  std::vector<QuantLayer> device;
  float in_scale = kPixelInputScale;
  for (std::size_t i = 0; i < split; ++i) {
    QuantLayer q;
    q.spec = layers[i];
    if (layers[i].kind == LayerKind::kConv2d) {
      const bool relu_next = i + 1 < split && layers[i + 1].kind == LayerKind::kRelu;
      q.out_scale = ScaleFor(relu_next ? max_abs[i + 1] : max_abs[i]);
      q.weight = QuantizeTensor(net.params()[i].weight);
      const double acc_scale = static_cast<double>(q.weight.scale) * in_scale;
      for (float b : net.params()[i].bias.values()) {
        const double r = std::nearbyint(static_cast<double>(b) / acc_scale);
        q.bias.push_back(static_cast<std::int32_t>(std::clamp(r, -2147483647.0, 2147483647.0)));
      }
      q.requant = MakeRequant(acc_scale / q.out_scale);
    } else {
      q.out_scale = in_scale;
    }
    in_scale = q.out_scale;
    device.push_back(std::move(q));
  }

  std::vector<LayerSpec> tail_layers(layers.begin() + static_cast<std::ptrdiff_t>(split),
                                     layers.end());
  Network tail(net.in_shape(split), tail_layers, net.class_count());
  for (std::size_t i = split; i < layers.size(); ++i) tail.params()[i - split] = net.params()[i];
  return QuantNetwork(net.input_shape(), std::move(device), std::move(tail));
}

DeviceFeatures DeviceForward(const QuantNetwork& qnet, const Image& image) {
  const auto& in = qnet.input_shape();
  Require(image.channels() == in[0] && image.height() == in[1] && image.width() == in[2],
          ErrorKind::kShape,
          "image " + std::to_string(image.width()) + "x" + std::to_string(image.height()) + "x" +
              std::to_string(image.channels()) + " does not match device input " +
              ShapeString(in));
  // Pixels arrive interleaved; the device works planar.
  IntAct act{in, std::vector<std::int32_t>(static_cast<std::size_t>(ShapeNumel(in)))};
  const auto px = image.pixels();
  const std::size_t plane = static_cast<std::size_t>(in[1]) * in[2];
  for (std::size_t p = 0; p < plane; ++p) {
    for (int c = 0; c < in[0]; ++c) {
      act.v[c * plane + p] = 2 * static_cast<std::int32_t>(px[p * in[0] + c]) - 255;
    }
  }
  for (const auto& layer : qnet.device_layers()) {
    switch (layer.spec.kind) {
      case LayerKind::kConv2d:
        act = ConvInt(act, layer);
        break;
      case LayerKind::kRelu:
        for (auto& v : act.v) v = std::max(v, 0);
        break;
      case LayerKind::kMaxPool:
        act = PoolInt(act, layer.spec);
        break;
      default:
        Fail(ErrorKind::kState, "unexpected device layer");
    }
  }
  DeviceFeatures f;
  f.scale = qnet.feature_scale();
  f.q.reserve(act.v.size());
  // A device half without layers would hand out 9-bit pixels; clamp keeps
  // the int8 contract.
  for (auto v : act.v) f.q.push_back(static_cast<std::int8_t>(std::clamp(v, -127, 127)));
  return f;
}

std::vector<float> HostTail(const QuantNetwork& qnet, const DeviceFeatures& features) {
  Require(features.q.size() == qnet.feature_count(), ErrorKind::kShape,
          "feature count " + std::to_string(features.q.size()) + " does not match the host tail (" +
              std::to_string(qnet.feature_count()) + ")");
  Tensor x(qnet.tail().input_shape());
  auto vals = x.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    vals[i] = static_cast<float>(features.q[i]) * features.scale;
  }
  const Tensor logits = qnet.tail().Forward(x);
  return {logits.values().begin(), logits.values().end()};
}

Tensor FloatFeatures(const Network& net, const Image& image) {
  return net.ForwardRange(ImageToTensor(image), 0, net.flatten_index());
}

std::vector<float> QuantClassifier::Scores(const Image& canvas) {
  return HostTail(qnet_, DeviceForward(qnet_, canvas));
}

std::vector<std::uint8_t> SerializeQuantNetwork(const QuantNetwork& qnet) {
  ByteWriter w;
  w.Tag(kQuantMagic);
  w.U8(kQuantVersion);
  for (int d : qnet.input_shape()) w.U16(static_cast<std::uint16_t>(d));
  w.U8(static_cast<std::uint8_t>(qnet.device_layers().size()));
  for (const auto& l : qnet.device_layers()) {
    w.U8(static_cast<std::uint8_t>(l.spec.kind));
    if (l.spec.kind == LayerKind::kConv2d) {
      w.U16(static_cast<std::uint16_t>(l.spec.out_channels));
      w.U16(static_cast<std::uint16_t>(l.spec.kernel));
      w.U16(static_cast<std::uint16_t>(l.spec.stride));
      w.U16(static_cast<std::uint16_t>(l.spec.pad));
      w.F32(l.weight.scale);
      for (auto q : l.weight.q) w.U8(static_cast<std::uint8_t>(q));
      for (auto b : l.bias) w.I32(b);
      w.I32(l.requant.multiplier);
      w.U8(static_cast<std::uint8_t>(l.requant.shift));
    } else if (l.spec.kind == LayerKind::kMaxPool) {
      w.U16(static_cast<std::uint16_t>(l.spec.kernel));
      w.U16(static_cast<std::uint16_t>(l.spec.stride));
    }
    w.F32(l.out_scale);
  }
  const auto tail = SerializeCheckpoint(qnet.tail());
  w.U32(static_cast<std::uint32_t>(tail.size()));
  w.Bytes(tail);
  return w.Take();
}

QuantNetwork DeserializeQuantNetwork(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (!r.Tag(kQuantMagic)) Fail(ErrorKind::kFormat, "not a quantized model (bad magic)");
  const std::uint8_t version = r.U8();
  if (version != kQuantVersion) {
    Fail(ErrorKind::kFormat, "unsupported quantized model version " + std::to_string(version));
  }
  std::vector<int> in(3);
  for (auto& d : in) d = r.U16();
  const int n = r.U8();
  std::vector<QuantLayer> device;
  int channels = in[0];
  for (int i = 0; i < n; ++i) {
    QuantLayer l;
    const auto kind = static_cast<LayerKind>(r.U8());
    if (kind == LayerKind::kConv2d) {
      const int out = r.U16(), k = r.U16(), stride = r.U16(), pad = r.U16();
      l.spec = LayerSpec::Conv(out, k, stride, pad);
      l.weight.shape = {out, channels, k, k};
      l.weight.scale = r.F32();
      const auto q = r.Bytes(static_cast<std::size_t>(out) * channels * k * k);
      l.weight.q.assign(q.begin(), q.end());
      for (int o = 0; o < out; ++o) l.bias.push_back(r.I32());
      l.requant.multiplier = r.I32();
      l.requant.shift = r.U8();
      channels = out;
    } else if (kind == LayerKind::kRelu) {
      l.spec = LayerSpec::Relu();
    } else if (kind == LayerKind::kMaxPool) {
      const int k = r.U16(), stride = r.U16();
      l.spec = LayerSpec::MaxPool(k, stride);
    } else {
      Fail(ErrorKind::kFormat, "unknown device layer kind " +
                                   std::to_string(static_cast<int>(kind)));
    }
    l.out_scale = r.F32();
    device.push_back(std::move(l));
  }
  const std::uint32_t tail_len = r.U32();
  Network tail = DeserializeCheckpoint(r.Bytes(tail_len));
  if (!r.done()) Fail(ErrorKind::kFormat, "trailing bytes after quantized model");
  try {
    return QuantNetwork(std::move(in), std::move(device), std::move(tail));
  } catch (const Error& e) {
    throw Error(ErrorKind::kFormat, std::string("inconsistent quantized model: ") + e.what());
  }
}

void SaveQuantNetwork(const QuantNetwork& qnet, const std::string& path) {
  WriteFileBytes(path, SerializeQuantNetwork(qnet));
}

QuantNetwork LoadQuantNetwork(const std::string& path) {
  return DeserializeQuantNetwork(ReadFileBytes(path));
}

}  // namespace superocr
