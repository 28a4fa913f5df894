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


#include <cmath>

#include "superocr/error.hpp"
#include "superocr/nn.hpp"
#include "superocr/rng.hpp"

namespace superocr {

LayerSpec LayerSpec::Conv(int out_channels, int kernel, int stride, int pad) {
  LayerSpec s;
  s.kind = LayerKind::kConv2d;
  s.out_channels = out_channels;
  s.kernel = kernel;
  s.stride = stride;
  s.pad = pad;
  return s;
}

LayerSpec LayerSpec::Relu() { return LayerSpec{}; }

LayerSpec LayerSpec::MaxPool(int kernel, int stride) {
  LayerSpec s;
  s.kind = LayerKind::kMaxPool;
  s.kernel = kernel;
  s.stride = stride;
  return s;
}

LayerSpec LayerSpec::Flatten() {
  LayerSpec s;
  s.kind = LayerKind::kFlatten;
  return s;
}

LayerSpec LayerSpec::Fc(int out_dim) {
  LayerSpec s;
  s.kind = LayerKind::kFc;
  s.out_dim = out_dim;
  return s;
}

std::string LayerSpec::ToString() const {
  switch (kind) {
    case LayerKind::kConv2d:
      return "conv" + std::to_string(kernel) + "x" + std::to_string(kernel) + "(" +
             std::to_string(out_channels) + ",s" + std::to_string(stride) + ",p" +
             std::to_string(pad) + ")";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kMaxPool:
      return "maxpool" + std::to_string(kernel) + "(s" + std::to_string(stride) + ")";
    case LayerKind::kFlatten: return "flatten";
    case LayerKind::kFc: return "fc(" + std::to_string(out_dim) + ")";
  }
  return "?";
}

Tensor ImageToTensor(const Image& image) {
  Tensor t({image.channels(), image.height(), image.width()});
  const int hw = image.width() * image.height();
  const auto px = image.pixels();
  for (int c = 0; c < image.channels(); ++c) {
    for (int i = 0; i < hw; ++i) {
      t[static_cast<std::size_t>(c) * hw + i] =
          (static_cast<float>(px[static_cast<std::size_t>(i) * image.channels() + c]) / 255.0f -
           kInputMean) /
          kInputStd;
    }
  }
  return t;
}

Network::Network(std::vector<int> input_shape, std::vector<LayerSpec> layers, int class_count)
    : input_shape_(std::move(input_shape)), layers_(std::move(layers)), class_count_(class_count) {
  Require(input_shape_.size() == 3, ErrorKind::kShape, "network input must be (C,H,W)");
  Require(class_count_ >= 1, ErrorKind::kShape, "class_count must be >= 1");
  ShapeNumel(input_shape_);
  shapes_.push_back(input_shape_);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const LayerSpec& l = layers_[i];
    const std::vector<int>& in = shapes_.back();
    std::vector<int> out;
    LayerParams p;
    const std::string where = "layer " + std::to_string(i) + " (" + l.ToString() + "): ";
    switch (l.kind) {
      case LayerKind::kConv2d: {
        Require(in.size() == 3, ErrorKind::kShape, where + "needs a [C,H,W] input");
        Require(l.out_channels >= 1 && l.kernel >= 1 && l.stride >= 1 && l.pad >= 0,
                ErrorKind::kShape, where + "bad hyperparameters");
        const int oh = (in[1] + 2 * l.pad - l.kernel) / l.stride + 1;
        const int ow = (in[2] + 2 * l.pad - l.kernel) / l.stride + 1;
        Require(in[1] + 2 * l.pad >= l.kernel && in[2] + 2 * l.pad >= l.kernel && oh >= 1 &&
                    ow >= 1,
                ErrorKind::kShape, where + "output would be smaller than 1x1");
        out = {l.out_channels, oh, ow};
        p.weight = Tensor({l.out_channels, in[0], l.kernel, l.kernel});
        p.bias = Tensor({l.out_channels});
        break;
      }
      case LayerKind::kRelu:
        out = in;
        break;
      case LayerKind::kMaxPool: {
        Require(in.size() == 3, ErrorKind::kShape, where + "needs a [C,H,W] input");
        Require(l.kernel >= 1 && l.stride >= 1, ErrorKind::kShape, where + "bad hyperparameters");
        Require(in[1] >= l.kernel && in[2] >= l.kernel, ErrorKind::kShape,
                where + "output would be smaller than 1x1");
        out = {in[0], (in[1] - l.kernel) / l.stride + 1, (in[2] - l.kernel) / l.stride + 1};
        break;
      }
      case LayerKind::kFlatten:
        out = {static_cast<int>(ShapeNumel(in))};
        break;
      case LayerKind::kFc:
        Require(in.size() == 1, ErrorKind::kShape, where + "needs a flattened input");
        Require(l.out_dim >= 1, ErrorKind::kShape, where + "out_dim must be >= 1");
        out = {l.out_dim};
        p.weight = Tensor({l.out_dim, in[0]});
        p.bias = Tensor({l.out_dim});
        break;
    }
    shapes_.push_back(out);
    params_.push_back(std::move(p));
  }
  Require(shapes_.back().size() == 1 && shapes_.back()[0] == class_count_, ErrorKind::kShape,
          "network output " + ShapeString(shapes_.back()) + " does not match class_count " +
              std::to_string(class_count_));
}

std::vector<LayerSpec> Network::SuperNetSLayers(int class_count) {
  return {LayerSpec::Conv(16, 3, 1, 1), LayerSpec::Relu(), LayerSpec::MaxPool(2, 2),
          LayerSpec::Conv(32, 3, 1, 1), LayerSpec::Relu(), LayerSpec::MaxPool(2, 2),
          LayerSpec::Conv(64, 3, 1, 1), LayerSpec::Relu(), LayerSpec::MaxPool(2, 2),
          LayerSpec::Flatten(),         LayerSpec::Fc(128), LayerSpec::Relu(),
          LayerSpec::Fc(class_count)};
}

Network Network::SuperNetS(int channels, int height, int width, int class_count) {
  return Network({channels, height, width}, SuperNetSLayers(class_count), class_count);
}

void Network::InitHe(std::uint64_t seed) {
  Rng rng(seed);
  std::size_t last = layers_.size();
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].parametric()) last = i;
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (!layers_[i].parametric()) continue;
    Tensor& w = params_[i].weight;
    if (i == last) {
      // Output layer starts at zero: uniform initial predictions.
      w.Fill(0.0f);
      params_[i].bias.Fill(0.0f);
      continue;
    }
    const std::size_t fan_in = w.size() / static_cast<std::size_t>(w.dim(0));
    const double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (auto& v : w.values()) v = static_cast<float>(std_dev * rng.Gaussian());
    params_[i].bias.Fill(0.0f);
  }
}

std::size_t Network::flatten_index() const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].kind == LayerKind::kFlatten) return i;
  }
  return layers_.size();
}

std::vector<Tensor*> Network::ParameterTensors() {
  std::vector<Tensor*> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (!layers_[i].parametric()) continue;
    out.push_back(&params_[i].weight);
    out.push_back(&params_[i].bias);
  }
  return out;
}

std::vector<const Tensor*> Network::ParameterTensors() const {
  std::vector<const Tensor*> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (!layers_[i].parametric()) continue;
    out.push_back(&params_[i].weight);
    out.push_back(&params_[i].bias);
  }
  return out;
}

std::size_t Network::ParameterCount() const {
  std::size_t n = 0;
  for (const Tensor* t : ParameterTensors()) n += t->size();
  return n;
}

Tensor Network::ForwardRange(const Tensor& x, std::size_t begin, std::size_t end) const {
  Require(begin <= end && end <= layers_.size(), ErrorKind::kInvalidArgument, "bad layer range");
  Require(x.shape() == shapes_[begin], ErrorKind::kShape,
          "input " + ShapeString(x.shape()) + " does not match expected " +
              ShapeString(shapes_[begin]));
  Tensor a = x;
  for (std::size_t i = begin; i < end; ++i) {
    const LayerSpec& l = layers_[i];
    switch (l.kind) {
      case LayerKind::kConv2d:
        a = Conv2dForward(a, params_[i].weight, params_[i].bias, l.stride, l.pad);
        break;
      case LayerKind::kRelu:
        a = ReluForward(a);
        break;
      case LayerKind::kMaxPool:
        a = MaxPoolForward(a, l.kernel, l.stride);
        break;
      case LayerKind::kFlatten:
        a = a.Reshaped({static_cast<int>(a.size())});
        break;
      case LayerKind::kFc:
        a = FcForward(a, params_[i].weight, params_[i].bias);
        break;
    }
  }
  return a;
}

Tensor Network::Forward(const Tensor& x) const { return ForwardRange(x, 0, layers_.size()); }

Tensor Network::Forward(const Image& image) const {
  Require(image.channels() == input_shape_[0] && image.height() == input_shape_[1] &&
              image.width() == input_shape_[2],
          ErrorKind::kShape, "image does not match the network input shape");
  return Forward(ImageToTensor(image));
}

std::vector<LayerParams> Network::ZeroGrads() const {
  std::vector<LayerParams> g(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!layers_[i].parametric()) continue;
    g[i].weight = Tensor(params_[i].weight.shape());
    g[i].bias = Tensor(params_[i].bias.shape());
  }
  return g;
}

double Network::ForwardBackward(const Tensor& x, int target, std::vector<LayerParams>& grads,
                                Tensor* grad_input) const {
  Require(grads.size() == params_.size(), ErrorKind::kShape, "gradient buffers do not match network");
  Require(x.shape() == input_shape_, ErrorKind::kShape, "input does not match the network");
  const std::size_t n = layers_.size();
  std::vector<Tensor> acts;
  acts.reserve(n + 1);
  std::vector<std::vector<int>> argmax(n);
  acts.push_back(x);
  for (std::size_t i = 0; i < n; ++i) {
    const LayerSpec& l = layers_[i];
    const Tensor& a = acts.back();
    switch (l.kind) {
      case LayerKind::kConv2d:
        acts.push_back(Conv2dForward(a, params_[i].weight, params_[i].bias, l.stride, l.pad));
        break;
      case LayerKind::kRelu:
        acts.push_back(ReluForward(a));
        break;
      case LayerKind::kMaxPool:
        acts.push_back(MaxPoolForward(a, l.kernel, l.stride, &argmax[i]));
        break;
      case LayerKind::kFlatten:
        acts.push_back(a.Reshaped({static_cast<int>(a.size())}));
        break;
      case LayerKind::kFc:
        acts.push_back(FcForward(a, params_[i].weight, params_[i].bias));
        break;
    }
  }

  LossAndGrad lg = SoftmaxXent(acts.back(), target);
  Tensor g = std::move(lg.grad);
  for (std::size_t ii = n; ii-- > 0;) {
    const LayerSpec& l = layers_[ii];
    const Tensor& in = acts[ii];
    const bool need_in = ii > 0 || grad_input != nullptr;
    switch (l.kind) {
      case LayerKind::kConv2d: {
        Tensor gi;
        if (need_in) gi = Tensor(in.shape());
        Conv2dBackward(g, in, params_[ii].weight, l.stride, l.pad, need_in ? &gi : nullptr,
                       grads[ii].weight, grads[ii].bias);
        g = std::move(gi);
        break;
      }
      case LayerKind::kRelu:
        g = ReluBackward(g, in);
        break;
      case LayerKind::kMaxPool:
        g = MaxPoolBackward(g, argmax[ii], in.shape());
        break;
      case LayerKind::kFlatten:
        g = g.Reshaped(in.shape());
        break;
      case LayerKind::kFc: {
        Tensor gi;
        if (need_in) gi = Tensor(in.shape());
        FcBackward(g, in, params_[ii].weight, need_in ? &gi : nullptr, grads[ii].weight,
                   grads[ii].bias);
        g = std::move(gi);
        break;
      }
    }
  }
  if (grad_input) *grad_input = std::move(g);
  return lg.loss;
}

}  // namespace superocr
