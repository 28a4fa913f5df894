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


#ifndef SUPEROCR_DIGEST_HPP_
#define SUPEROCR_DIGEST_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <string>

namespace superocr {

// Incremental SHA-256 backed by OpenSSL.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void Update(std::span<const std::uint8_t> bytes);
  void Update(const std::string& s);
  std::string HexDigest();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string Sha256Hex(std::span<const std::uint8_t> bytes);
std::string FileSha256(const std::string& path);

}  // namespace superocr

#endif  // SUPEROCR_DIGEST_HPP_
