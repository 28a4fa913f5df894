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


#ifndef SUPEROCR_RNG_HPP_
#define SUPEROCR_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace superocr {

// SplitMix64 finalizer over (a, b): the per-sample seed derivation.
std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b);
// FNV-1a; used to salt seeds with preset names.
std::uint64_t HashName(std::string_view name);

// Deterministic generator. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the distributions below are written
// out here because the std:: distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream)
      : engine_(MixSeed(MixSeed(seed, index), stream)) {}

  std::uint64_t Next() { return engine_(); }
  // [0, 1) with 53 random bits.
  double Uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }
  // Uniform integer in [lo, hi], rejection-sampled.
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);
  // Standard normal via Box-Muller; the second variate is cached.
  double Gaussian();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace superocr

#endif  // SUPEROCR_RNG_HPP_
