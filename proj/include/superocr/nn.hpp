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


#ifndef SUPEROCR_NN_HPP_
#define SUPEROCR_NN_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "superocr/image.hpp"
#include "superocr/tensor.hpp"

namespace superocr {

// ---------------------------------------------------------------------------
// Layer operators. Activations are single samples: conv and pool take
// [C,H,W]; fc takes a rank-1 vector. Gradient outputs are accumulated (+=)
// so a mini-batch can sum into one buffer.
// ---------------------------------------------------------------------------

Tensor Conv2dForward(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int pad);
// grad_in may be null when the input gradient is not needed.
void Conv2dBackward(const Tensor& grad_out, const Tensor& x, const Tensor& w, int stride,
                    int pad, Tensor* grad_in, Tensor& grad_w, Tensor& grad_b);

Tensor ReluForward(const Tensor& x);
// Passes gradient where the cached input is > 0.
Tensor ReluBackward(const Tensor& grad_out, const Tensor& x);

// argmax receives, per output element, the flat input index it was taken
// from (first index on ties).
Tensor MaxPoolForward(const Tensor& x, int k, int stride, std::vector<int>* argmax = nullptr);
Tensor MaxPoolBackward(const Tensor& grad_out, const std::vector<int>& argmax,
                       const std::vector<int>& in_shape);

Tensor FcForward(const Tensor& x, const Tensor& w, const Tensor& b);
void FcBackward(const Tensor& grad_out, const Tensor& x, const Tensor& w, Tensor* grad_in,
                Tensor& grad_w, Tensor& grad_b);

struct LossAndGrad {
  double loss = 0.0;
  Tensor grad;
};
// -log softmax(logits)[target] with max subtraction; grad = softmax - onehot.
LossAndGrad SoftmaxXent(const Tensor& logits, int target);

// ---------------------------------------------------------------------------
// Sequential network.
// ---------------------------------------------------------------------------

enum class LayerKind : std::uint8_t {
  kConv2d = 1,
  kRelu = 2,
  kMaxPool = 3,
  kFlatten = 4,
  kFc = 5,
};

struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  int out_channels = 0;  // conv
  int kernel = 0;        // conv, maxpool
  int stride = 1;        // conv, maxpool
  int pad = 0;           // conv
  int out_dim = 0;       // fc

  static LayerSpec Conv(int out_channels, int kernel, int stride = 1, int pad = 0);
  static LayerSpec Relu();
  static LayerSpec MaxPool(int kernel, int stride);
  static LayerSpec Flatten();
  static LayerSpec Fc(int out_dim);

  bool parametric() const { return kind == LayerKind::kConv2d || kind == LayerKind::kFc; }
  std::string ToString() const;
  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// Mean and standard deviation applied after scaling pixels to [0, 1].
inline constexpr float kInputMean = 0.5f;
inline constexpr float kInputStd = 0.25f;

// Image -> [C,H,W] tensor, (p/255 - mean) / std.
Tensor ImageToTensor(const Image& image);

struct LayerParams {
  Tensor weight;
  Tensor bias;
  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

class Network {
 public:
  Network() = default;
  // Validates the whole shape chain; parameters start at zero.
  Network(std::vector<int> input_shape, std::vector<LayerSpec> layers, int class_count);

  // conv3x3(16)/relu/pool2, conv3x3(32)/relu/pool2, conv3x3(64)/relu/pool2,
  // flatten, fc(128)/relu, fc(classes).
  static Network SuperNetS(int channels, int height, int width, int class_count);
  static std::vector<LayerSpec> SuperNetSLayers(int class_count);

  // He fan-in normal weights from the seeded generator; zero biases. The
  // output layer is all zeros.
  void InitHe(std::uint64_t seed);

  const std::vector<int>& input_shape() const { return input_shape_; }
  const std::vector<LayerSpec>& layers() const { return layers_; }
  int class_count() const { return class_count_; }
  // Output shape of layer i (input to layer i+1).
  const std::vector<int>& out_shape(std::size_t i) const { return shapes_[i + 1]; }
  const std::vector<int>& in_shape(std::size_t i) const { return shapes_[i]; }
  // Index of the flatten layer, or layers().size() if there is none.
  std::size_t flatten_index() const;

  std::vector<LayerParams>& params() { return params_; }
  const std::vector<LayerParams>& params() const { return params_; }
  // Every parameter tensor in layer order (weight then bias).
  std::vector<Tensor*> ParameterTensors();
  std::vector<const Tensor*> ParameterTensors() const;
  std::size_t ParameterCount() const;

  Tensor Forward(const Tensor& x) const;
  Tensor Forward(const Image& image) const;
  // Runs layers [begin, end) on x.
  Tensor ForwardRange(const Tensor& x, std::size_t begin, std::size_t end) const;

  // Zeroed gradient buffers shaped like params().
  std::vector<LayerParams> ZeroGrads() const;

  // Forward + backward for one sample; accumulates into grads and returns
  // the loss. The input gradient is returned through grad_input if non-null.
  double ForwardBackward(const Tensor& x, int target, std::vector<LayerParams>& grads,
                         Tensor* grad_input = nullptr) const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::vector<int> input_shape_;
  std::vector<LayerSpec> layers_;
  int class_count_ = 0;
  std::vector<std::vector<int>> shapes_;
  std::vector<LayerParams> params_;
};

}  // namespace superocr

#endif  // SUPEROCR_NN_HPP_
