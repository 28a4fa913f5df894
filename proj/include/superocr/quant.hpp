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


#ifndef SUPEROCR_QUANT_HPP_
#define SUPEROCR_QUANT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "superocr/decoder.hpp"
#include "superocr/image.hpp"
#include "superocr/nn.hpp"
#include "superocr/tensor.hpp"

namespace superocr {

// Symmetric per-tensor int8: real = q * scale, q in [-127, 127].
struct QuantTensor {
  std::vector<int> shape;
  std::vector<std::int8_t> q;
  float scale = 1.0f;

  Tensor Dequantize() const;
  friend bool operator==(const QuantTensor&, const QuantTensor&) = default;
};

// scale = max|x| / 127 (1 for an all-zero tensor).
QuantTensor QuantizeTensor(const Tensor& x);

// Fixed-point multiplier: real factor = multiplier * 2^-shift, with the
// multiplier in [2^30, 2^31) unless the factor is zero.
struct Requant {
  std::int32_t multiplier = 0;
  int shift = 0;
  friend bool operator==(const Requant&, const Requant&) = default;
};
Requant MakeRequant(double factor);
// round(acc * factor), ties toward +inf, saturated to int8.
std::int8_t ApplyRequant(std::int64_t acc, const Requant& r);

// Device-side layer: conv, relu or maxpool.
struct QuantLayer {
  LayerSpec spec;
  QuantTensor weight;              // conv only
  std::vector<std::int32_t> bias;  // conv only, at weight.scale * input scale
  Requant requant;                 // conv only
  float out_scale = 1.0f;          // activation scale after this layer
  friend bool operator==(const QuantLayer&, const QuantLayer&) = default;
};

struct DeviceFeatures {
  std::vector<std::int8_t> q;
  float scale = 1.0f;
  friend bool operator==(const DeviceFeatures&, const DeviceFeatures&) = default;
};

// The first device layer reads raw pixels as 2p - 255, which is the
// normalized input times 127.5.
inline constexpr float kPixelInputScale = 1.0f / 127.5f;

class QuantNetwork {
 public:
  QuantNetwork() = default;
  QuantNetwork(std::vector<int> input_shape, std::vector<QuantLayer> device, Network tail);

  const std::vector<int>& input_shape() const { return input_shape_; }
  const std::vector<QuantLayer>& device_layers() const { return device_; }
  // Float layers from flatten onward; its input shape is the feature shape.
  const Network& tail() const { return tail_; }
  int class_count() const { return tail_.class_count(); }
  std::size_t feature_count() const;
  float feature_scale() const;

  friend bool operator==(const QuantNetwork&, const QuantNetwork&) = default;

 private:
  std::vector<int> input_shape_;
  std::vector<QuantLayer> device_;
  Network tail_;
};

// Weights quantized per tensor; activation scales from the max |activation|
// over the calibration images (after the following relu when there is one).
QuantNetwork QuantizeModel(const Network& net, const std::vector<Image>& calib);

// Integer-only conv stack.
DeviceFeatures DeviceForward(const QuantNetwork& qnet, const Image& image);
// Dequantizes features and applies the float tail.
std::vector<float> HostTail(const QuantNetwork& qnet, const DeviceFeatures& features);

// Float conv stack output for comparison with the device half.
Tensor FloatFeatures(const Network& net, const Image& image);

// "SOCQ", version u8, input shape, device layers, then the tail checkpoint.
std::vector<std::uint8_t> SerializeQuantNetwork(const QuantNetwork& qnet);
QuantNetwork DeserializeQuantNetwork(std::span<const std::uint8_t> bytes);
void SaveQuantNetwork(const QuantNetwork& qnet, const std::string& path);
QuantNetwork LoadQuantNetwork(const std::string& path);

// Device and host halves run in-process.
class QuantClassifier : public Classifier {
 public:
  explicit QuantClassifier(const QuantNetwork& qnet) : qnet_(qnet) {}
  int class_count() const override { return qnet_.class_count(); }
  std::vector<float> Scores(const Image& canvas) override;

 private:
  const QuantNetwork& qnet_;
};

}  // namespace superocr

#endif  // SUPEROCR_QUANT_HPP_
