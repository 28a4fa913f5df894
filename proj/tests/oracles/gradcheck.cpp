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


#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "oracles.hpp"

namespace superocr::oracle {

namespace {

std::vector<double> Doubles(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

Tensor RandomTensor(std::mt19937_64& gen, std::vector<int> shape, double scale = 1.0) {
  Tensor t(std::move(shape));
  std::normal_distribution<double> d(0.0, scale);
  for (auto& v : t.values()) v = static_cast<float>(d(gen));
  return t;
}

// Distinct values on a 0.01 grid, none closer than 0.005 to zero, so no kink or
// tie lies within one finite-difference step.
Tensor GridTensor(std::mt19937_64& gen, std::vector<int> shape) {
  Tensor t(std::move(shape));
  std::vector<int> grid(t.size());
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<int>(i);
  std::shuffle(grid.begin(), grid.end(), gen);
  const int half = static_cast<int>(grid.size()) / 2;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    t[i] = static_cast<float>((grid[i] - half + 0.5) * 0.01);
  }
  return t;
}

double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Array WithShape(const std::vector<int>& shape, std::vector<double> v) { return {shape, std::move(v)}; }

void Accumulate(GradCheck& out, const std::vector<double>& analytic,
                const std::vector<double>& numeric) {
  out.max_rel_error = std::max(out.max_rel_error, MaxRelError(analytic, numeric, kRelFloor));
  out.coords += analytic.size();
}

int Pick(std::mt19937_64& gen, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(gen);
}

}  // namespace

GradCheck CheckConv(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const int c = Pick(gen, 1, 3), o = Pick(gen, 1, 3), k = Pick(gen, 1, 3);
  const int stride = Pick(gen, 1, 2), pad = Pick(gen, 0, 1);
  const int h = Pick(gen, k, 6), w = Pick(gen, k, 6);
  const Tensor x = RandomTensor(gen, {c, h, w});
  const Tensor wt = RandomTensor(gen, {o, c, k, k}, 0.5);
  const Tensor b = RandomTensor(gen, {o});
  const Tensor y = Conv2dForward(x, wt, b, stride, pad);
  const Tensor r = RandomTensor(gen, y.shape());
  Tensor gx(x.shape()), gw(wt.shape()), gb(b.shape());
  Conv2dBackward(r, x, wt, stride, pad, &gx, gw, gb);

  const auto rv = Doubles(r);
  const Array xa = Array::From(x), wa = Array::From(wt), ba = Array::From(b);
  GradCheck out{"conv2d"};
  Accumulate(out, Doubles(gx), FdGradient([&](const std::vector<double>& v) {
               return Dot(rv, NaiveConv2d(WithShape(xa.shape, v), wa, ba, stride, pad).v);
             }, xa.v, kFdEps));
  Accumulate(out, Doubles(gw), FdGradient([&](const std::vector<double>& v) {
               return Dot(rv, NaiveConv2d(xa, WithShape(wa.shape, v), ba, stride, pad).v);
             }, wa.v, kFdEps));
  Accumulate(out, Doubles(gb), FdGradient([&](const std::vector<double>& v) {
               return Dot(rv, NaiveConv2d(xa, wa, WithShape(ba.shape, v), stride, pad).v);
             }, ba.v, kFdEps));
  return out;
}

GradCheck CheckRelu(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const Tensor x = GridTensor(gen, {Pick(gen, 1, 3), Pick(gen, 2, 5), Pick(gen, 2, 5)});
  const Tensor r = RandomTensor(gen, x.shape());
  const Tensor g = ReluBackward(r, x);
  const auto rv = Doubles(r);
  const Array xa = Array::From(x);
  GradCheck out{"relu"};
  Accumulate(out, Doubles(g), FdGradient([&](const std::vector<double>& v) {
               return Dot(rv, NaiveRelu(WithShape(xa.shape, v)).v);
             }, xa.v, kFdEps));
  return out;
}

GradCheck CheckMaxPool(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const int k = Pick(gen, 1, 3), stride = Pick(gen, 1, 2);
  const Tensor x = GridTensor(gen, {Pick(gen, 1, 3), Pick(gen, k, 6), Pick(gen, k, 6)});
  std::vector<int> argmax;
  const Tensor y = MaxPoolForward(x, k, stride, &argmax);
  const Tensor r = RandomTensor(gen, y.shape());
  const Tensor g = MaxPoolBackward(r, argmax, x.shape());
  const auto rv = Doubles(r);
  const Array xa = Array::From(x);
  GradCheck out{"maxpool"};
  Accumulate(out, Doubles(g), FdGradient([&](const std::vector<double>& v) {
               return Dot(rv, NaiveMaxPool(WithShape(xa.shape, v), k, stride).v);
             }, xa.v, kFdEps));
  return out;
}

GradCheck CheckFc(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const int in = Pick(gen, 1, 12), outd = Pick(gen, 1, 8);
  const Tensor x = RandomTensor(gen, {in});
  const Tensor w = RandomTensor(gen, {outd, in}, 0.5);
  const Tensor b = RandomTensor(gen, {outd});
  const Tensor r = RandomTensor(gen, {outd});
  Tensor gx(x.shape()), gw(w.shape()), gb(b.shape());
  FcBackward(r, x, w, &gx, gw, gb);
  const auto rv = Doubles(r);
  const Array xa = Array::From(x), wa = Array::From(w), ba = Array::From(b);
  GradCheck out{"fc"};
  Accumulate(out, Doubles(gx), FdGradient([&](const std::vector<double>& v) {
               return Dot(rv, NaiveFc(WithShape(xa.shape, v), wa, ba).v);
             }, xa.v, kFdEps));
  Accumulate(out, Doubles(gw), FdGradient([&](const std::vector<double>& v) {
               return Dot(rv, NaiveFc(xa, WithShape(wa.shape, v), ba).v);
             }, wa.v, kFdEps));
  Accumulate(out, Doubles(gb), FdGradient([&](const std::vector<double>& v) {
               return Dot(rv, NaiveFc(xa, wa, WithShape(ba.shape, v)).v);
             }, ba.v, kFdEps));
  return out;
}

GradCheck CheckSoftmaxXent(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const int k = Pick(gen, 2, 20);
  const Tensor logits = RandomTensor(gen, {k}, 2.0);
  const int target = Pick(gen, 0, k - 1);
  const LossAndGrad lg = SoftmaxXent(logits, target);
  GradCheck out{"softmax_xent"};
  Accumulate(out, Doubles(lg.grad), FdGradient([&](const std::vector<double>& v) {
               return NaiveXent(v, target);
             }, Doubles(logits), kFdEps));
  return out;
}

GradCheck CheckNetwork(const Network& net, const Tensor& x, int target, int per_tensor,
                       std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<LayerParams> grads = net.ZeroGrads();
  Tensor gx;
  net.ForwardBackward(x, target, grads, &gx);

  GradCheck out{"network"};
  const Array xa = Array::From(x);
  auto sample = [&](std::size_t size) {
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), gen);
    idx.resize(std::min<std::size_t>(size, static_cast<std::size_t>(per_tensor)));
    return idx;
  };
  // Central difference along one coordinate. `eval(h)` returns the loss and
  // the activation pattern with the coordinate shifted by h, plus the
  // realized shift. The step shrinks while the two sides differ in pattern.
  struct Point {
    double loss;
    double at;
    std::vector<int> pattern;
  };
  auto central = [&](const std::function<Point(double)>& eval) {
    double eps = kFdEps;
    for (;;) {
      const Point up = eval(eps), down = eval(-eps);
      if (up.pattern == down.pattern || eps < 1e-6) {
        if (eps != kFdEps) ++out.reduced_steps;
        return (up.loss - down.loss) / (up.at - down.at);
      }
      eps /= 10;
    }
  };

  for (std::size_t li = 0; li < net.layers().size(); ++li) {
    if (!net.layers()[li].parametric()) continue;
    for (int which = 0; which < 2; ++which) {
      const Tensor& t = which == 0 ? net.params()[li].weight : net.params()[li].bias;
      const Tensor& g = which == 0 ? grads[li].weight : grads[li].bias;
      std::vector<double> analytic, numeric;
      for (std::size_t i : sample(t.size())) {
        analytic.push_back(g[i]);
        // The naive forward reads the float parameters, so the realized
        // shift is the float difference.
        numeric.push_back(central([&](double h) {
          Network n = net;
          Tensor& tn = which == 0 ? n.params()[li].weight : n.params()[li].bias;
          tn[i] = static_cast<float>(t[i] + h);
          Point p{0.0, static_cast<double>(tn[i]), {}};
          p.loss = NaiveXent(NaiveForward(n, xa, &p.pattern).v, target);
          return p;
        }));
      }
      Accumulate(out, analytic, numeric);
    }
  }
  std::vector<double> analytic, numeric;
  for (std::size_t i : sample(x.size())) {
    analytic.push_back(gx[i]);
    numeric.push_back(central([&](double h) {
      Array in = xa;
      in.v[i] += h;
      Point p{0.0, in.v[i], {}};
      p.loss = NaiveXent(NaiveForward(net, in, &p.pattern).v, target);
      return p;
    }));
  }
  Accumulate(out, analytic, numeric);
  return out;
}

std::vector<GradCheck> GradientSuite() {
  std::vector<GradCheck> all;
  auto worst = [](GradCheck acc, const GradCheck& g) {
    acc.max_rel_error = std::max(acc.max_rel_error, g.max_rel_error);
    acc.coords += g.coords;
    acc.reduced_steps += g.reduced_steps;
    return acc;
  };
  GradCheck conv{"conv2d"}, relu{"relu"}, pool{"maxpool"}, fc{"fc"}, xent{"softmax_xent"};
  for (std::uint64_t s = 1; s <= 20; ++s) {
    conv = worst(conv, CheckConv(s));
    relu = worst(relu, CheckRelu(s));
    pool = worst(pool, CheckMaxPool(s));
    fc = worst(fc, CheckFc(s));
    xent = worst(xent, CheckSoftmaxXent(s));
  }
  all = {conv, relu, pool, fc, xent};

  Network net = Network::SuperNetS(1, 96, 96, 16);
  net.InitHe(7);
  std::mt19937_64 gen(11);
  // The output layer starts at zero, which would hide every upstream
  // gradient; give it random weights.
  net.params().back().weight = RandomTensor(gen, net.params().back().weight.shape(), 0.1);
  Tensor x({1, 96, 96});
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (auto& v : x.values()) v = static_cast<float>(u(gen));
  GradCheck full = CheckNetwork(net, x, 3, 6, 5);
  full.name = "supernet_s";
  all.push_back(full);
  return all;
}

}  // namespace superocr::oracle
