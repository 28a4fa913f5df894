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


#include "superocr/tensor.hpp"

#include <algorithm>

#include "superocr/error.hpp"

namespace superocr {

std::size_t ShapeNumel(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    Require(d >= 1, ErrorKind::kShape, "tensor dimensions must be >= 1, got " + ShapeString(shape));
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string ShapeString(const std::vector<int>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor::Tensor(std::vector<int> shape, float fill)
    : shape_(std::move(shape)), data_(ShapeNumel(shape_), fill) {
  Require(!shape_.empty(), ErrorKind::kShape, "tensor needs at least one dimension");
}

Tensor::Tensor(std::vector<int> shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(data.begin(), data.end()) {
  Require(!shape_.empty(), ErrorKind::kShape, "tensor needs at least one dimension");
  Require(ShapeNumel(shape_) == data_.size(), ErrorKind::kShape,
          "data length does not match shape " + ShapeString(shape_));
}

Tensor Tensor::Reshaped(std::vector<int> shape) const {
  Require(ShapeNumel(shape) == data_.size(), ErrorKind::kShape,
          "reshape to " + ShapeString(shape) + " changes the element count");
  Tensor t;
  t.shape_ = std::move(shape);
  t.data_ = data_;
  return t;
}

void Tensor::Fill(float v) { std::fill(data_.begin(), data_.end(), v); }

}  // namespace superocr
