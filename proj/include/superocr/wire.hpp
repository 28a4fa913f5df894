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


#ifndef SUPEROCR_WIRE_HPP_
#define SUPEROCR_WIRE_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "superocr/alphabet.hpp"
#include "superocr/canvas.hpp"
#include "superocr/decoder.hpp"
#include "superocr/image.hpp"
#include "superocr/quant.hpp"

namespace superocr {

// Frame: "SOCR", version u8, type u8, payload length u32 LE, payload.
inline constexpr std::uint8_t kWireVersion = 1;
inline constexpr std::size_t kFrameHeaderSize = 10;
inline constexpr std::uint32_t kMaxPayload = 64u << 20;

enum class MsgType : std::uint8_t {
  kInferRequest = 1,
  kInferResponse = 2,
  kError = 3,
};

struct WireMessage {
  std::uint8_t version = kWireVersion;
  MsgType type = MsgType::kInferRequest;
  std::vector<std::uint8_t> payload;
  friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

struct FrameHeader {
  std::uint8_t version = 0;
  MsgType type = MsgType::kError;
  std::uint32_t payload_len = 0;
};

std::vector<std::uint8_t> EncodeFrame(const WireMessage& msg);
// Throws kProtocol on bad magic, unknown type or an oversized payload. Any
// version is accepted here; the device answers version mismatches itself.
FrameHeader DecodeFrameHeader(std::span<const std::uint8_t> header);
// Whole frame; the length must match exactly.
WireMessage DecodeFrame(std::span<const std::uint8_t> frame);

// Request payload: width u16, height u16, channels u8, pixels.
std::vector<std::uint8_t> EncodeInferRequest(const Image& image);
Image DecodeInferRequest(std::span<const std::uint8_t> payload);
// Response payload: count u32, scale f32, int8 features.
std::vector<std::uint8_t> EncodeInferResponse(const DeviceFeatures& features);
DeviceFeatures DecodeInferResponse(std::span<const std::uint8_t> payload);
// Error payload: UTF-8 message.
WireMessage ErrorMessage(const std::string& text);

// Reliable byte stream. Reads and writes throw kTransport on failure.
class ByteStream {
 public:
  virtual ~ByteStream() = default;
  virtual void Write(std::span<const std::uint8_t> bytes) = 0;
  // Reads up to n bytes; 0 means the peer closed.
  virtual std::size_t ReadSome(std::uint8_t* dst, std::size_t n) = 0;
  virtual void Close() = 0;
};

// Stream over a connected socket descriptor; owns it.
class SocketStream : public ByteStream {
 public:
  explicit SocketStream(int fd) : fd_(fd) {}
  ~SocketStream() override;
  SocketStream(const SocketStream&) = delete;
  SocketStream& operator=(const SocketStream&) = delete;

  void Write(std::span<const std::uint8_t> bytes) override;
  std::size_t ReadSome(std::uint8_t* dst, std::size_t n) override;
  void Close() override;

 private:
  int fd_;
};

// Connected local pair.
std::pair<std::unique_ptr<SocketStream>, std::unique_ptr<SocketStream>> StreamPair();

// Endpoints are "HOST:PORT" (TCP) or "unix:PATH".
std::unique_ptr<SocketStream> Connect(const std::string& endpoint);

class StreamListener {
 public:
  explicit StreamListener(const std::string& endpoint);
  ~StreamListener();
  StreamListener(const StreamListener&) = delete;
  StreamListener& operator=(const StreamListener&) = delete;

  // Bound TCP port (useful with port 0), or 0 for unix sockets.
  int port() const { return port_; }
  std::string endpoint() const { return endpoint_; }
  std::unique_ptr<SocketStream> Accept();

 private:
  int fd_ = -1;
  int port_ = 0;
  std::string endpoint_;
  std::string unix_path_;
};

// Reads one frame. A clean close before the first header byte is a
// transport error; a close inside a frame is a protocol error.
WireMessage ReadFrame(ByteStream& stream);
void WriteFrame(ByteStream& stream, const WireMessage& msg);

// Coprocessor emulator: answers infer requests with device-half features.
class DeviceEmulator {
 public:
  explicit DeviceEmulator(const QuantNetwork& qnet) : qnet_(qnet) {}

  // One request frame in, one response or error frame out.
  std::vector<std::uint8_t> HandleFrame(std::span<const std::uint8_t> frame) const;
  WireMessage Handle(const WireMessage& request) const;
  // Serves requests until the peer closes. A malformed frame is answered
  // with an error frame and ends the session.
  void Serve(ByteStream& stream) const;

 private:
  const QuantNetwork& qnet_;
};

// Host side of a request/response exchange.
class DeviceChannel {
 public:
  virtual ~DeviceChannel() = default;
  virtual WireMessage Exchange(const WireMessage& request) = 0;
};

// Frames pass through encode and decode, but no socket.
class InProcessChannel : public DeviceChannel {
 public:
  explicit InProcessChannel(const DeviceEmulator& device) : device_(device) {}
  WireMessage Exchange(const WireMessage& request) override;

 private:
  const DeviceEmulator& device_;
};

class StreamChannel : public DeviceChannel {
 public:
  explicit StreamChannel(ByteStream& stream) : stream_(stream) {}
  WireMessage Exchange(const WireMessage& request) override;

 private:
  ByteStream& stream_;
};

// Classifier whose conv stack runs behind a channel. Error frames raise
// kRemote; malformed responses raise kProtocol.
class DeviceClassifier : public Classifier {
 public:
  DeviceClassifier(DeviceChannel& channel, const QuantNetwork& host)
      : channel_(channel), host_(host) {}
  int class_count() const override { return host_.class_count(); }
  std::vector<float> Scores(const Image& canvas) override;

 private:
  DeviceChannel& channel_;
  const QuantNetwork& host_;
};

SymbolString HostDecodeViaDevice(const Image& scene, DeviceChannel& channel,
                                 const QuantNetwork& host, const LayoutSpec& layout,
                                 const GlyphFont& font, const Alphabet& alphabet, int string_len);

}  // namespace superocr

#endif  // SUPEROCR_WIRE_HPP_
