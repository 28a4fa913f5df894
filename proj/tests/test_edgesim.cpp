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
#include <limits>
#include <random>
#include <thread>

#include "doctest.h"
#include "superocr/error.hpp"
#include "superocr/quant.hpp"
#include "superocr/taskgen.hpp"
#include "superocr/wire.hpp"

using namespace superocr;

namespace {

ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::kInvalidArgument;
}

Network RandomNet(std::uint64_t seed) {
  Network net = Network::SuperNetS(1, 96, 96, 16);
  net.InitHe(seed);
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> nd(0.0f, 0.05f);
  auto& last = net.params().back();
  for (std::size_t i = 0; i < last.weight.size(); ++i) last.weight[i] = nd(rng);
  for (std::size_t i = 0; i < last.bias.size(); ++i) last.bias[i] = nd(rng);
  return net;
}

struct Setup {
  LayoutSpec layout = LayoutSpec::Desk();
  Alphabet alphabet = Alphabet::Hex16();
  std::vector<LabeledScene> scenes = GenSplit(SubsetConfig("clean", TaskConfig{}), 20, 0);
  Network net = RandomNet(3);
  std::vector<Image> Calib() const {
    std::vector<Image> out;
    for (int i = 0; i < 8; ++i) {
      out.push_back(Compose(scenes[i].image, scenes[i].label.substr(0, i % 5), layout,
                            GlyphFont::Builtin()));
    }
    return out;
  }
};

}  // namespace

TEST_CASE("quantize tensor") {
  Tensor x({3});
  x[0] = -1.0f;
  x[1] = 0.5f;
  x[2] = 1.0f;
  const QuantTensor q = QuantizeTensor(x);
  CHECK(q.scale == doctest::Approx(1.0f / 127.0f));
  CHECK(q.q[0] == -127);
  CHECK(q.q[2] == 127);
  CHECK(q.q[1] == 64);  // 63.5 rounds away from zero

  const QuantTensor z = QuantizeTensor(Tensor({4}));
  CHECK(z.scale == 1.0f);
  for (auto v : z.q) CHECK(v == 0);

  std::mt19937_64 rng(5);
  std::normal_distribution<float> nd(0.0f, 3.0f);
  for (int t = 0; t < 20; ++t) {
    Tensor r({7, 9});
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = nd(rng);
    const QuantTensor qr = QuantizeTensor(r);
    const Tensor back = qr.Dequantize();
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(std::abs(back[i] - r[i]) <= qr.scale * 0.5f * (1 + 1e-5f));
      CHECK(std::abs(int{qr.q[i]}) <= 127);
    }
  }
  Tensor bad({2});
  bad[1] = std::numeric_limits<float>::quiet_NaN();
  CHECK(KindOf([&] { QuantizeTensor(bad); }) == ErrorKind::kNumeric);
}

TEST_CASE("requantization") {
  for (double f : {0.5, 0.001, 0.75, 1.0 / 3.0, 2.5e-6}) {
    const Requant r = MakeRequant(f);
    CHECK(r.multiplier >= (1 << 30));
    const double real = std::ldexp(static_cast<double>(r.multiplier), -r.shift);
    CHECK(real == doctest::Approx(f).epsilon(1e-8));
  }
  CHECK(MakeRequant(0.0).multiplier == 0);
  const Requant half = MakeRequant(0.5);
  CHECK(ApplyRequant(3, half) == 2);    // 1.5 -> 2
  CHECK(ApplyRequant(-3, half) == -1);  // -1.5 -> -1
  CHECK(ApplyRequant(1000, half) == 127);
  CHECK(ApplyRequant(-1000, half) == -127);
  CHECK(ApplyRequant(123456, MakeRequant(0.0)) == 0);
}

TEST_CASE("quantized model tracks the float network") {
  Setup s;
  const QuantNetwork a = QuantizeModel(s.net, s.Calib());
  const QuantNetwork b = QuantizeModel(s.net, s.Calib());
  CHECK(SerializeQuantNetwork(a) == SerializeQuantNetwork(b));
  CHECK(DeserializeQuantNetwork(SerializeQuantNetwork(a)) == a);
  CHECK(a.feature_count() == 64u * 12 * 12);

  double mae_sum = 0.0;
  std::size_t mae_n = 0;
  for (int i = 0; i < 10; ++i) {
    const Image img = Compose(s.scenes[i].image, s.scenes[i].label.substr(0, i % 5), s.layout,
                              GlyphFont::Builtin());
    const DeviceFeatures d = DeviceForward(a, img);
    CHECK(d == DeviceForward(a, img));
    const Tensor f = FloatFeatures(s.net, img);
    REQUIRE(f.size() == d.q.size());
    double dot = 0, na = 0, nb = 0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      CHECK(std::abs(int{d.q[k]}) <= 127);
      const double dq = d.q[k] * static_cast<double>(d.scale);
      dot += dq * f[k];
      na += dq * dq;
      nb += static_cast<double>(f[k]) * f[k];
      mae_sum += std::abs(dq - f[k]);
      ++mae_n;
    }
    CHECK(dot / std::sqrt(na * nb) >= 0.99);
  }
  CHECK(mae_sum / mae_n <= 3.0 * a.feature_scale());
}

TEST_CASE("quantize model errors and degenerate weights") {
  Setup s;
  CHECK(KindOf([&] { QuantizeModel(s.net, {}); }) == ErrorKind::kInvalidArgument);
  Network zero = Network::SuperNetS(1, 96, 96, 16);
  const QuantNetwork q = QuantizeModel(zero, s.Calib());
  const DeviceFeatures d = DeviceForward(q, s.Calib()[0]);
  for (auto v : d.q) CHECK(v == 0);
  for (float v : HostTail(q, d)) CHECK(v == 0.0f);
  CHECK(KindOf([&] { DeviceForward(q, Image(32, 32, 1)); }) == ErrorKind::kShape);
  auto bytes = SerializeQuantNetwork(q);
  bytes[0] = 'X';
  CHECK(KindOf([&] { DeserializeQuantNetwork(bytes); }) == ErrorKind::kFormat);
  bytes = SerializeQuantNetwork(q);
  bytes.resize(bytes.size() / 2);
  CHECK(KindOf([&] { DeserializeQuantNetwork(bytes); }) == ErrorKind::kFormat);
}

TEST_CASE("wire frames round trip") {
  Image img(5, 3, 1);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 5; ++x) img.at(x, y) = static_cast<std::uint8_t>(x * 40 + y);
  DeviceFeatures feats{{-127, 0, 5, 127}, 0.25f};
  const std::vector<WireMessage> msgs = {
      {kWireVersion, MsgType::kInferRequest, EncodeInferRequest(img)},
      {kWireVersion, MsgType::kInferResponse, EncodeInferResponse(feats)},
      ErrorMessage("device fault"),
      {kWireVersion, MsgType::kInferRequest, {}},
  };
  for (const auto& m : msgs) {
    const auto frame = EncodeFrame(m);
    CHECK(frame.size() == kFrameHeaderSize + m.payload.size());
    CHECK(DecodeFrame(frame) == m);
    CHECK(EncodeFrame(DecodeFrame(frame)) == frame);
  }
  CHECK(DecodeInferRequest(EncodeInferRequest(img)) == img);
  CHECK(DecodeInferResponse(EncodeInferResponse(feats)) == feats);

  const auto frame = EncodeFrame(msgs[0]);
  CHECK(frame[0] == 'S');
  CHECK(frame[3] == 'R');
  CHECK(frame[4] == 1);
  CHECK(frame[5] == 1);
  CHECK(frame[6] == 5 + 15);
  CHECK(frame[7] == 0);

  std::vector<std::uint8_t> bad = frame;
  bad[0] = 'X';
  CHECK(KindOf([&] { DecodeFrame(bad); }) == ErrorKind::kProtocol);
  bad = frame;
  bad[5] = 9;
  CHECK(KindOf([&] { DecodeFrame(bad); }) == ErrorKind::kProtocol);
  bad = frame;
  bad.pop_back();
  CHECK(KindOf([&] { DecodeFrame(bad); }) == ErrorKind::kProtocol);
  bad = frame;
  bad.resize(4);
  CHECK(KindOf([&] { DecodeFrame(bad); }) == ErrorKind::kProtocol);
  CHECK(KindOf([&] { DecodeInferResponse(EncodeInferResponse({{-128}, 1.0f})); }) ==
        ErrorKind::kProtocol);
}

TEST_CASE("device error paths") {
  Setup s;
  const QuantNetwork q = QuantizeModel(s.net, s.Calib());
  const DeviceEmulator dev(q);
  const Image canvas = s.Calib()[0];

  // Version mismatch is answered with an error frame.
  WireMessage req{2, MsgType::kInferRequest, EncodeInferRequest(canvas)};
  const WireMessage reply = DecodeFrame(dev.HandleFrame(EncodeFrame(req)));
  CHECK(reply.type == MsgType::kError);

  // Wrong image shape gives an error frame too, which the host raises as remote.
  class WrongShape : public DeviceChannel {
   public:
    explicit WrongShape(const DeviceEmulator& d) : d_(d) {}
    WireMessage Exchange(const WireMessage&) override {
      return d_.Handle({kWireVersion, MsgType::kInferRequest, EncodeInferRequest(Image(4, 4, 1))});
    }
    const DeviceEmulator& d_;
  } wrong(dev);
  DeviceClassifier remote(wrong, q);
  CHECK(KindOf([&] { remote.Scores(canvas); }) == ErrorKind::kRemote);

  // Truncated response inside a frame.
  {
    auto [host, device] = StreamPair();
    std::thread t([&, d = std::move(device)]() mutable {
      ReadFrame(*d);
      auto full = EncodeFrame({kWireVersion, MsgType::kInferResponse,
                               EncodeInferResponse({std::vector<std::int8_t>(10, 1), 1.0f})});
      full.resize(full.size() - 3);
      d->Write(full);
      d->Close();
    });
    StreamChannel ch(*host);
    DeviceClassifier clf(ch, q);
    CHECK(KindOf([&] { clf.Scores(canvas); }) == ErrorKind::kProtocol);
    t.join();
  }
  // Closed before any reply.
  {
    auto [host, device] = StreamPair();
    std::thread t([d = std::move(device)]() mutable {
      ReadFrame(*d);
      d->Close();
    });
    StreamChannel ch(*host);
    DeviceClassifier clf(ch, q);
    CHECK(KindOf([&] { clf.Scores(canvas); }) == ErrorKind::kTransport);
    t.join();
  }
  // A malformed request frame ends the device session with an error frame.
  {
    auto [host, device] = StreamPair();
    std::thread t([&, d = std::move(device)]() mutable { dev.Serve(*d); });
    std::vector<std::uint8_t> junk = {'J', 'U', 'N', 'K', 1, 1, 0, 0, 0, 0};
    host->Write(junk);
    CHECK(ReadFrame(*host).type == MsgType::kError);
    t.join();
  }
}

TEST_CASE("served decode equals in-process decode") {
  Setup s;
  const QuantNetwork q = QuantizeModel(s.net, s.Calib());
  const DeviceEmulator dev(q);
  InProcessChannel local(dev);
  QuantClassifier direct(q);

  StreamListener listener("127.0.0.1:0");
  CHECK(listener.port() > 0);
  std::thread server([&] {
    auto conn = listener.Accept();
    dev.Serve(*conn);
  });
  auto conn = Connect(listener.endpoint());
  StreamChannel remote(*conn);
  for (const auto& sc : s.scenes) {
    const SymbolString a =
        HostDecodeViaDevice(sc.image, local, q, s.layout, GlyphFont::Builtin(), s.alphabet, 5);
    const SymbolString b =
        HostDecodeViaDevice(sc.image, remote, q, s.layout, GlyphFont::Builtin(), s.alphabet, 5);
    const SymbolString c = Decode(sc.image, direct, s.layout, GlyphFont::Builtin(), s.alphabet, 5);
    CHECK(a == b);
    CHECK(a == c);
  }
  conn->Close();
  server.join();
}
