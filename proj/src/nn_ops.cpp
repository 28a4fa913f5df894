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


#include <Eigen/Core>

#include <algorithm>
#include <cmath>

#include "superocr/error.hpp"
#include "superocr/nn.hpp"

namespace superocr {

namespace {

using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;
using VecMap = Eigen::Map<Eigen::VectorXf>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXf>;

struct ConvGeom {
  int c, h, w, o, k, oh, ow;
};

ConvGeom CheckConv(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int pad) {
  Require(x.rank() == 3, ErrorKind::kShape, "conv input must be [C,H,W], got " + ShapeString(x.shape()));
  Require(w.rank() == 4 && w.dim(2) == w.dim(3), ErrorKind::kShape,
          "conv weight must be [O,C,k,k], got " + ShapeString(w.shape()));
  Require(w.dim(1) == x.dim(0), ErrorKind::kShape, "conv channel mismatch");
  Require(b.rank() == 1 && b.dim(0) == w.dim(0), ErrorKind::kShape, "conv bias mismatch");
  Require(stride >= 1 && pad >= 0, ErrorKind::kShape, "bad conv stride/pad");
  ConvGeom g{x.dim(0), x.dim(1), x.dim(2), w.dim(0), w.dim(2), 0, 0};
  const int span_h = g.h + 2 * pad - g.k;
  const int span_w = g.w + 2 * pad - g.k;
  Require(span_h >= 0 && span_w >= 0, ErrorKind::kShape, "conv kernel larger than padded input");
  g.oh = span_h / stride + 1;
  g.ow = span_w / stride + 1;
  return g;
}

// Patch matrix with rows ordered (c, u, v) and one column per output pixel.
void Im2Col(const Tensor& x, const ConvGeom& g, int stride, int pad, FloatBuffer& col) {
  const int positions = g.oh * g.ow;
  col.assign(static_cast<std::size_t>(g.c) * g.k * g.k * positions, 0.0f);
  const float* src = x.data();
  for (int c = 0; c < g.c; ++c) {
    for (int u = 0; u < g.k; ++u) {
      for (int v = 0; v < g.k; ++v) {
        float* row = col.data() + (static_cast<std::size_t>((c * g.k + u) * g.k + v)) * positions;
        for (int i = 0; i < g.oh; ++i) {
          const int y = i * stride + u - pad;
          if (y < 0 || y >= g.h) continue;
          const float* srow = src + (static_cast<std::size_t>(c) * g.h + y) * g.w;
          float* drow = row + i * g.ow;
          for (int j = 0; j < g.ow; ++j) {
            const int xx = j * stride + v - pad;
            if (xx >= 0 && xx < g.w) drow[j] = srow[xx];
          }
        }
      }
    }
  }
}

void Col2Im(const FloatBuffer& col, const ConvGeom& g, int stride, int pad, Tensor& dx) {
  const int positions = g.oh * g.ow;
  float* dst = dx.data();
  for (int c = 0; c < g.c; ++c) {
    for (int u = 0; u < g.k; ++u) {
      for (int v = 0; v < g.k; ++v) {
        const float* row =
            col.data() + (static_cast<std::size_t>((c * g.k + u) * g.k + v)) * positions;
        for (int i = 0; i < g.oh; ++i) {
          const int y = i * stride + u - pad;
          if (y < 0 || y >= g.h) continue;
          float* drow = dst + (static_cast<std::size_t>(c) * g.h + y) * g.w;
          const float* srow = row + i * g.ow;
          for (int j = 0; j < g.ow; ++j) {
            const int xx = j * stride + v - pad;
            if (xx >= 0 && xx < g.w) drow[xx] += srow[j];
          }
        }
      }
    }
  }
}

thread_local FloatBuffer tl_col;
thread_local FloatBuffer tl_dcol;

}  // namespace

Tensor Conv2dForward(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int pad) {
  const ConvGeom g = CheckConv(x, w, b, stride, pad);
  const int kk = g.c * g.k * g.k;
  const int positions = g.oh * g.ow;
  Im2Col(x, g, stride, pad, tl_col);
  Tensor y({g.o, g.oh, g.ow});
  MatMap ym(y.data(), g.o, positions);
  ym.noalias() = ConstMatMap(w.data(), g.o, kk) * ConstMatMap(tl_col.data(), kk, positions);
  for (int o = 0; o < g.o; ++o) ym.row(o).array() += b[o];
  return y;
}

void Conv2dBackward(const Tensor& grad_out, const Tensor& x, const Tensor& w, int stride,
                    int pad, Tensor* grad_in, Tensor& grad_w, Tensor& grad_b) {
  Tensor zero_b({w.dim(0)});
  const ConvGeom g = CheckConv(x, w, zero_b, stride, pad);
  Require(grad_out.shape() == std::vector<int>{g.o, g.oh, g.ow}, ErrorKind::kShape,
          "conv grad_out shape mismatch");
  Require(grad_w.shape() == w.shape() && grad_b.size() == static_cast<std::size_t>(g.o),
          ErrorKind::kShape, "conv gradient buffer mismatch");
  const int kk = g.c * g.k * g.k;
  const int positions = g.oh * g.ow;
  Im2Col(x, g, stride, pad, tl_col);
  ConstMatMap dy(grad_out.data(), g.o, positions);
  MatMap(grad_w.data(), g.o, kk).noalias() +=
      dy * ConstMatMap(tl_col.data(), kk, positions).transpose();
  VecMap(grad_b.data(), g.o) += dy.rowwise().sum();
  if (grad_in) {
    Require(grad_in->shape() == x.shape(), ErrorKind::kShape, "conv grad_in shape mismatch");
    tl_dcol.resize(static_cast<std::size_t>(kk) * positions);
    MatMap(tl_dcol.data(), kk, positions).noalias() =
        ConstMatMap(w.data(), g.o, kk).transpose() * dy;
    Col2Im(tl_dcol, g, stride, pad, *grad_in);
  }
}

Tensor ReluForward(const Tensor& x) {
  Tensor y = x;
  for (auto& v : y.values()) v = v > 0.0f ? v : 0.0f;
  return y;
}

Tensor ReluBackward(const Tensor& grad_out, const Tensor& x) {
  Require(grad_out.shape() == x.shape(), ErrorKind::kShape, "relu grad shape mismatch");
  Tensor g = grad_out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(x[i] > 0.0f)) g[i] = 0.0f;
  }
  return g;
}

Tensor MaxPoolForward(const Tensor& x, int k, int stride, std::vector<int>* argmax) {
  Require(x.rank() == 3, ErrorKind::kShape, "maxpool input must be [C,H,W]");
  Require(k >= 1 && stride >= 1, ErrorKind::kShape, "bad maxpool kernel/stride");
  const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
  Require(h >= k && w >= k, ErrorKind::kShape, "maxpool kernel larger than input");
  const int oh = (h - k) / stride + 1;
  const int ow = (w - k) / stride + 1;
  Tensor y({c, oh, ow});
  if (argmax) argmax->assign(y.size(), 0);
  std::size_t out = 0;
  for (int ch = 0; ch < c; ++ch) {
    for (int i = 0; i < oh; ++i) {
      for (int j = 0; j < ow; ++j, ++out) {
        int best = (ch * h + i * stride) * w + j * stride;
        float best_v = x[best];
        for (int u = 0; u < k; ++u) {
          for (int v = 0; v < k; ++v) {
            const int idx = (ch * h + i * stride + u) * w + j * stride + v;
            if (x[idx] > best_v) {
              best_v = x[idx];
              best = idx;
            }
          }
        }
        y[out] = best_v;
        if (argmax) (*argmax)[out] = best;
      }
    }
  }
  return y;
}

Tensor MaxPoolBackward(const Tensor& grad_out, const std::vector<int>& argmax,
                       const std::vector<int>& in_shape) {
  Require(argmax.size() == grad_out.size(), ErrorKind::kState,
          "maxpool backward without a matching forward cache");
  Tensor g(in_shape);
  for (std::size_t i = 0; i < argmax.size(); ++i) g[argmax[i]] += grad_out[i];
  return g;
}

Tensor FcForward(const Tensor& x, const Tensor& w, const Tensor& b) {
  Require(x.rank() == 1, ErrorKind::kShape, "fc input must be a vector");
  Require(w.rank() == 2 && w.dim(1) == x.dim(0), ErrorKind::kShape,
          "fc weight " + ShapeString(w.shape()) + " does not match input " + ShapeString(x.shape()));
  Require(b.rank() == 1 && b.dim(0) == w.dim(0), ErrorKind::kShape, "fc bias mismatch");
  Tensor y({w.dim(0)});
  VecMap(y.data(), w.dim(0)).noalias() =
      ConstMatMap(w.data(), w.dim(0), w.dim(1)) * ConstVecMap(x.data(), x.dim(0));
  VecMap(y.data(), w.dim(0)) += ConstVecMap(b.data(), b.dim(0));
  return y;
}

void FcBackward(const Tensor& grad_out, const Tensor& x, const Tensor& w, Tensor* grad_in,
                Tensor& grad_w, Tensor& grad_b) {
  const int out = w.dim(0), in = w.dim(1);
  Require(grad_out.size() == static_cast<std::size_t>(out) &&
              x.size() == static_cast<std::size_t>(in),
          ErrorKind::kShape, "fc backward shape mismatch");
  Require(grad_w.shape() == w.shape() && grad_b.size() == static_cast<std::size_t>(out),
          ErrorKind::kShape, "fc gradient buffer mismatch");
  ConstVecMap dy(grad_out.data(), out);
  MatMap(grad_w.data(), out, in).noalias() += dy * ConstVecMap(x.data(), in).transpose();
  VecMap(grad_b.data(), out) += dy;
  if (grad_in) {
    Require(grad_in->size() == static_cast<std::size_t>(in), ErrorKind::kShape,
            "fc grad_in shape mismatch");
    VecMap(grad_in->data(), in).noalias() += ConstMatMap(w.data(), out, in).transpose() * dy;
  }
}

LossAndGrad SoftmaxXent(const Tensor& logits, int target) {
  Require(logits.rank() == 1, ErrorKind::kShape, "logits must be a vector");
  const int k = logits.dim(0);
  Require(target >= 0 && target < k, ErrorKind::kInvalidArgument,
          "target class " + std::to_string(target) + " out of range");
  double mx = logits[0];
  for (int i = 1; i < k; ++i) mx = std::max<double>(mx, logits[i]);
  double z = 0.0;
  for (int i = 0; i < k; ++i) z += std::exp(logits[i] - mx);
  LossAndGrad out;
  out.loss = std::log(z) - (logits[target] - mx);
  out.grad = Tensor({k});
  for (int i = 0; i < k; ++i) {
    out.grad[i] = static_cast<float>(std::exp(logits[i] - mx) / z - (i == target ? 1.0 : 0.0));
  }
  return out;
}

}  // namespace superocr
