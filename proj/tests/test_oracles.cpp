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

#include "doctest.h"
#include "gradcheck.hpp"
#include "oracles.hpp"

using namespace superocr;
using namespace superocr::oracle;

TEST_CASE("finite differences of known functions") {
  const auto sq = FdGradient([](const std::vector<double>& w) { return w[0] * w[0]; }, {3.0}, 1e-3);
  CHECK(sq[0] == doctest::Approx(6.0).epsilon(1e-9));
  const auto lin = FdGradient(
      [](const std::vector<double>& w) { return 2.0 * w[0] - 5.0 * w[1] + 0.5 * w[2]; },
      {1.0, -4.0, 9.0}, 1e-3);
  CHECK(lin[0] == doctest::Approx(2.0));
  CHECK(lin[1] == doctest::Approx(-5.0));
  CHECK(lin[2] == doctest::Approx(0.5));
}

TEST_CASE("relative error helper") {
  CHECK(MaxRelError({1.0, 2.0}, {1.0, 2.0}) == 0.0);
  CHECK(MaxRelError({1.0}, {1.1}) == doctest::Approx(0.1 / 1.1));
  CHECK(MaxRelError({1e-9}, {0.0}, 1e-3) == doctest::Approx(1e-6));
}

TEST_CASE("naive conv identities") {
  Array x{{1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9}};
  Array w{{1, 1, 1, 1}, {1.0}};
  Array b{{1}, {0.0}};
  const Array y = NaiveConv2d(x, w, b, 1, 0);
  CHECK(y.shape == std::vector<int>{1, 3, 3});
  CHECK(y.v == x.v);

  Array zero{{2, 4, 4}, std::vector<double>(32, 0.0)};
  Array w3{{3, 2, 3, 3}, std::vector<double>(54, 0.7)};
  Array b3{{3}, {1.5, -2.0, 0.25}};
  const Array z = NaiveConv2d(zero, w3, b3, 1, 1);
  CHECK(z.shape == std::vector<int>{3, 4, 4});
  for (int o = 0; o < 3; ++o)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(z.at(o, i, j) == b3.v[o]);
}

TEST_CASE("naive pooling, relu, fc and cross entropy") {
  Array x{{1, 2, 4}, {1, -2, 3, 0, 5, 6, -7, 8}};
  const Array p = NaiveMaxPool(x, 2, 2);
  CHECK(p.shape == std::vector<int>{1, 1, 2});
  CHECK(p.v == std::vector<double>{6, 8});
  CHECK(NaiveRelu(x).v == std::vector<double>{1, 0, 3, 0, 5, 6, 0, 8});

  Array in{{3}, {1, 2, 3}};
  Array w{{2, 3}, {1, 0, 0, 0, 1, 1}};
  Array b{{2}, {0.5, -1}};
  CHECK(NaiveFc(in, w, b).v == std::vector<double>{1.5, 4});

  CHECK(NaiveXent({0.0, 0.0, 0.0, 0.0}, 2) == doctest::Approx(std::log(4.0)));
  CHECK(NaiveXent({1000.0, 0.0}, 0) == doctest::Approx(0.0));
}

TEST_CASE("naive resize of a constant image is constant") {
  Image img(7, 5, 1, 93);
  const Image r = NaiveResize(img, 13, 3);
  CHECK(r.width() == 13);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 13; ++x) CHECK(r.at(x, y) == 93);
}

TEST_CASE("layer gradient checks pass") {
  for (const GradCheck& g : {CheckConv(3), CheckRelu(3), CheckMaxPool(3), CheckFc(3),
                             CheckSoftmaxXent(3)}) {
    CAPTURE(g.name);
    CHECK(g.coords > 0);
    CHECK(g.max_rel_error < 1e-3);
  }
}
