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

#ifndef SUPEROCR_ERROR_HPP_
#define SUPEROCR_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace superocr {

enum class ErrorKind {
  kInvalidArgument,
  kMissingGlyph,
  kMissingClass,
  kCapacity,
  kShape,
  kState,
  kNumeric,
  kFormat,
  kIo,
  kContract,
  kProtocol,
  kRemote,
  kTransport,
};

const char* ErrorKindName(ErrorKind kind);

// Process exit code for a failure of the given kind:
// 2 invalid arguments, 3 data/format, 4 numeric, 5 transport/protocol.
int ExitCodeFor(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void Require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace superocr

#endif  // SUPEROCR_ERROR_HPP_
