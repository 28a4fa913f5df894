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


#include "superocr/wire.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "superocr/bytes.hpp"
#include "superocr/error.hpp"

namespace superocr {

namespace {

constexpr char kWireMagic[5] = "SOCR";

[[noreturn]] void SysFail(const std::string& what) {
  Fail(ErrorKind::kTransport, what + ": " + std::strerror(errno));
}

bool KnownType(std::uint8_t t) { return t >= 1 && t <= 3; }

struct HostPort {
  std::string host;
  std::string port;
};

HostPort SplitEndpoint(const std::string& endpoint) {
  const auto colon = endpoint.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == endpoint.size()) {
    Fail(ErrorKind::kInvalidArgument, "endpoint must be HOST:PORT or unix:PATH, got '" +
                                          endpoint + "'");
  }
  return {endpoint.substr(0, colon), endpoint.substr(colon + 1)};
}

bool IsUnix(const std::string& endpoint) { return endpoint.rfind("unix:", 0) == 0; }

sockaddr_un UnixAddress(const std::string& path) {
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  Require(!path.empty() && path.size() < sizeof(addr.sun_path), ErrorKind::kInvalidArgument,
          "bad unix socket path '" + path + "'");
  std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
  return addr;
}

void ReadExact(ByteStream& stream, std::uint8_t* dst, std::size_t n, bool at_frame_start) {
  std::size_t got = 0;
  while (got < n) {
    const std::size_t r = stream.ReadSome(dst + got, n - got);
    if (r == 0) {
      if (got == 0 && at_frame_start) Fail(ErrorKind::kTransport, "channel closed by peer");
      Fail(ErrorKind::kProtocol, "truncated frame: stream ended after " +
                                     std::to_string(got) + " of " + std::to_string(n) + " bytes");
    }
    got += r;
  }
}

}  // namespace

std::vector<std::uint8_t> EncodeFrame(const WireMessage& msg) {
  Require(KnownType(static_cast<std::uint8_t>(msg.type)), ErrorKind::kProtocol,
          "unknown message type");
  Require(msg.payload.size() <= kMaxPayload, ErrorKind::kProtocol, "payload too large");
  ByteWriter w;
  w.Tag(kWireMagic);
  w.U8(msg.version);
  w.U8(static_cast<std::uint8_t>(msg.type));
  w.U32(static_cast<std::uint32_t>(msg.payload.size()));
  w.Bytes(msg.payload);
  return w.Take();
}

FrameHeader DecodeFrameHeader(std::span<const std::uint8_t> header) {
  ByteReader r(header, ErrorKind::kProtocol);
  if (!r.Tag(kWireMagic)) Fail(ErrorKind::kProtocol, "bad frame magic");
  FrameHeader h;
  h.version = r.U8();
  const std::uint8_t type = r.U8();
  if (!KnownType(type)) {
    Fail(ErrorKind::kProtocol, "unknown message type " + std::to_string(type));
  }
  h.type = static_cast<MsgType>(type);
  h.payload_len = r.U32();
  if (h.payload_len > kMaxPayload) {
    Fail(ErrorKind::kProtocol, "payload length " + std::to_string(h.payload_len) +
                                   " exceeds limit");
  }
  return h;
}

WireMessage DecodeFrame(std::span<const std::uint8_t> frame) {
  if (frame.size() < kFrameHeaderSize) {
    Fail(ErrorKind::kProtocol, "truncated frame header (" + std::to_string(frame.size()) +
                                   " bytes)");
  }
  const FrameHeader h = DecodeFrameHeader(frame.first(kFrameHeaderSize));
  const std::size_t body = frame.size() - kFrameHeaderSize;
  if (body != h.payload_len) {
    Fail(ErrorKind::kProtocol, "payload length field says " + std::to_string(h.payload_len) +
                                   " but frame carries " + std::to_string(body) + " bytes");
  }
  WireMessage msg;
  msg.version = h.version;
  msg.type = h.type;
  msg.payload.assign(frame.begin() + kFrameHeaderSize, frame.end());
  return msg;
}

std::vector<std::uint8_t> EncodeInferRequest(const Image& image) {
  ByteWriter w;
  w.U16(static_cast<std::uint16_t>(image.width()));
  w.U16(static_cast<std::uint16_t>(image.height()));
  w.U8(static_cast<std::uint8_t>(image.channels()));
  w.Bytes(image.pixels());
  return w.Take();
}

Image DecodeInferRequest(std::span<const std::uint8_t> payload) {
  ByteReader r(payload, ErrorKind::kProtocol);
  const int w = r.U16(), h = r.U16(), c = r.U8();
  if (w < 1 || h < 1 || (c != 1 && c != 3)) {
    Fail(ErrorKind::kProtocol, "bad request geometry " + std::to_string(w) + "x" +
                                   std::to_string(h) + "x" + std::to_string(c));
  }
  const std::size_t n = static_cast<std::size_t>(w) * h * c;
  if (r.remaining() != n) {
    Fail(ErrorKind::kProtocol, "request carries " + std::to_string(r.remaining()) +
                                   " pixel bytes, expected " + std::to_string(n));
  }
  const auto px = r.Bytes(n);
  return Image(w, h, c, std::vector<std::uint8_t>(px.begin(), px.end()));
}

std::vector<std::uint8_t> EncodeInferResponse(const DeviceFeatures& features) {
  ByteWriter w;
  w.U32(static_cast<std::uint32_t>(features.q.size()));
  w.F32(features.scale);
  for (auto q : features.q) w.U8(static_cast<std::uint8_t>(q));
  return w.Take();
}

DeviceFeatures DecodeInferResponse(std::span<const std::uint8_t> payload) {
  ByteReader r(payload, ErrorKind::kProtocol);
  const std::uint32_t count = r.U32();
  DeviceFeatures f;
  f.scale = r.F32();
  if (r.remaining() != count) {
    Fail(ErrorKind::kProtocol, "response declares " + std::to_string(count) +
                                   " features but carries " + std::to_string(r.remaining()));
  }
  const auto q = r.Bytes(count);
  f.q.reserve(count);
  for (auto b : q) {
    const auto v = static_cast<std::int8_t>(b);
    if (v == -128) Fail(ErrorKind::kProtocol, "feature value -128 outside the int8 range");
    f.q.push_back(v);
  }
  return f;
}

WireMessage ErrorMessage(const std::string& text) {
  WireMessage m;
  m.type = MsgType::kError;
  m.payload.assign(text.begin(), text.end());
  return m;
}

SocketStream::~SocketStream() { Close(); }

void SocketStream::Close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void SocketStream::Write(std::span<const std::uint8_t> bytes) {
  Require(fd_ >= 0, ErrorKind::kTransport, "write on closed stream");
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      SysFail("send");
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::size_t SocketStream::ReadSome(std::uint8_t* dst, std::size_t n) {
  Require(fd_ >= 0, ErrorKind::kTransport, "read on closed stream");
  for (;;) {
    const ssize_t r = ::recv(fd_, dst, n, 0);
    if (r >= 0) return static_cast<std::size_t>(r);
    if (errno == EINTR) continue;
    if (errno == ECONNRESET) return 0;
    SysFail("recv");
  }
}

std::pair<std::unique_ptr<SocketStream>, std::unique_ptr<SocketStream>> StreamPair() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) SysFail("socketpair");
  return {std::make_unique<SocketStream>(fds[0]), std::make_unique<SocketStream>(fds[1])};
}

std::unique_ptr<SocketStream> Connect(const std::string& endpoint) {
  if (IsUnix(endpoint)) {
    const sockaddr_un addr = UnixAddress(endpoint.substr(5));
    const int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
    if (fd < 0) SysFail("socket");
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
      const int saved = errno;
      ::close(fd);
      errno = saved;
      SysFail("connect " + endpoint);
    }
    return std::make_unique<SocketStream>(fd);
  }
  const HostPort hp = SplitEndpoint(endpoint);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (const int rc = ::getaddrinfo(hp.host.c_str(), hp.port.c_str(), &hints, &res); rc != 0) {
    Fail(ErrorKind::kTransport, "cannot resolve " + endpoint + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  std::string last = "no addresses";
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    last = std::strerror(errno);
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) Fail(ErrorKind::kTransport, "connect " + endpoint + ": " + last);
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return std::make_unique<SocketStream>(fd);
}

StreamListener::StreamListener(const std::string& endpoint) {
  if (IsUnix(endpoint)) {
    unix_path_ = endpoint.substr(5);
    const sockaddr_un addr = UnixAddress(unix_path_);
    fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
    if (fd_ < 0) SysFail("socket");
    ::unlink(unix_path_.c_str());
    if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
      SysFail("bind " + endpoint);
    }
    endpoint_ = endpoint;
  } else {
    const HostPort hp = SplitEndpoint(endpoint);
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    if (const int rc = ::getaddrinfo(hp.host.c_str(), hp.port.c_str(), &hints, &res); rc != 0) {
      Fail(ErrorKind::kTransport, "cannot resolve " + endpoint + ": " + ::gai_strerror(rc));
    }
    fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd_ < 0) {
      ::freeaddrinfo(res);
      SysFail("socket");
    }
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    const int rc = ::bind(fd_, res->ai_addr, res->ai_addrlen);
    ::freeaddrinfo(res);
    if (rc != 0) SysFail("bind " + endpoint);
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
    endpoint_ = hp.host + ":" + std::to_string(port_);
  }
  if (::listen(fd_, 8) != 0) SysFail("listen " + endpoint);
}

StreamListener::~StreamListener() {
  if (fd_ >= 0) ::close(fd_);
  if (!unix_path_.empty()) ::unlink(unix_path_.c_str());
}

std::unique_ptr<SocketStream> StreamListener::Accept() {
  for (;;) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return std::make_unique<SocketStream>(fd);
    if (errno != EINTR) SysFail("accept");
  }
}

WireMessage ReadFrame(ByteStream& stream) {
  std::uint8_t header[kFrameHeaderSize];
  ReadExact(stream, header, kFrameHeaderSize, true);
  const FrameHeader h = DecodeFrameHeader(header);
  WireMessage msg;
  msg.version = h.version;
  msg.type = h.type;
  msg.payload.resize(h.payload_len);
  if (h.payload_len > 0) ReadExact(stream, msg.payload.data(), h.payload_len, false);
  return msg;
}

void WriteFrame(ByteStream& stream, const WireMessage& msg) { stream.Write(EncodeFrame(msg)); }

WireMessage DeviceEmulator::Handle(const WireMessage& request) const {
  if (request.version != kWireVersion) {
    return ErrorMessage("unsupported protocol version " + std::to_string(request.version));
  }
  if (request.type != MsgType::kInferRequest) {
    return ErrorMessage("device accepts only infer requests");
  }
  try {
    const Image image = DecodeInferRequest(request.payload);
    WireMessage resp;
    resp.type = MsgType::kInferResponse;
    resp.payload = EncodeInferResponse(DeviceForward(qnet_, image));
    return resp;
  } catch (const Error& e) {
    return ErrorMessage(e.what());
  }
}

std::vector<std::uint8_t> DeviceEmulator::HandleFrame(std::span<const std::uint8_t> frame) const {
  try {
    return EncodeFrame(Handle(DecodeFrame(frame)));
  } catch (const Error& e) {
    return EncodeFrame(ErrorMessage(e.what()));
  }
}

void DeviceEmulator::Serve(ByteStream& stream) const {
  for (;;) {
    WireMessage request;
    try {
      request = ReadFrame(stream);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kTransport) return;  // peer closed
      try {
        WriteFrame(stream, ErrorMessage(e.what()));
      } catch (const Error&) {
      }
      return;
    }
    WriteFrame(stream, Handle(request));
  }
}

WireMessage InProcessChannel::Exchange(const WireMessage& request) {
  return DecodeFrame(device_.HandleFrame(EncodeFrame(request)));
}

WireMessage StreamChannel::Exchange(const WireMessage& request) {
  WriteFrame(stream_, request);
  return ReadFrame(stream_);
}

std::vector<float> DeviceClassifier::Scores(const Image& canvas) {
  WireMessage req;
  req.type = MsgType::kInferRequest;
  req.payload = EncodeInferRequest(canvas);
  const WireMessage resp = channel_.Exchange(req);
  if (resp.version != kWireVersion) {
    Fail(ErrorKind::kProtocol, "device answered with version " + std::to_string(resp.version));
  }
  if (resp.type == MsgType::kError) {
    Fail(ErrorKind::kRemote, "device error: " +
                                 std::string(resp.payload.begin(), resp.payload.end()));
  }
  if (resp.type != MsgType::kInferResponse) {
    Fail(ErrorKind::kProtocol, "device answered with an unexpected message type");
  }
  return HostTail(host_, DecodeInferResponse(resp.payload));
}

SymbolString HostDecodeViaDevice(const Image& scene, DeviceChannel& channel,
                                 const QuantNetwork& host, const LayoutSpec& layout,
                                 const GlyphFont& font, const Alphabet& alphabet, int string_len) {
  DeviceClassifier clf(channel, host);
  return Decode(scene, clf, layout, font, alphabet, string_len);
}

}  // namespace superocr
