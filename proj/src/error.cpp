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


#include "superocr/error.hpp"

namespace superocr {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kMissingGlyph: return "missing-glyph";
    case ErrorKind::kMissingClass: return "missing-class";
    case ErrorKind::kCapacity: return "capacity";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kState: return "state";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kContract: return "contract";
    case ErrorKind::kProtocol: return "protocol";
    case ErrorKind::kRemote: return "remote";
    case ErrorKind::kTransport: return "transport";
  }
  return "unknown";
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return 2;
    case ErrorKind::kNumeric:
      return 4;
    case ErrorKind::kProtocol:
    case ErrorKind::kRemote:
    case ErrorKind::kTransport:
      return 5;
    default:
      return 3;
  }
}

}  // namespace superocr
