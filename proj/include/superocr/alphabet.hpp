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


#ifndef SUPEROCR_ALPHABET_HPP_
#define SUPEROCR_ALPHABET_HPP_

#include <optional>
#include <string>
#include <vector>

namespace superocr {

// A character string is a sequence of class symbols. Symbols are Unicode
// code points so that plate alphabets can carry province characters.
using Symbol = char32_t;
using SymbolString = std::u32string;

// Ordered class set. Class index i maps to symbols()[i].
class Alphabet {
 public:
  Alphabet() = default;
  Alphabet(std::string name, std::vector<Symbol> symbols,
           std::vector<bool> mid_state_flags = {});

  // 0-9 then A-F.
  static Alphabet Hex16();
  // 0-9 regular wheel states, then a-j for the ten intermediate states.
  static Alphabet Watermeter();
  // 31 province characters, 24 letters (no I/O), 10 digits: 65 classes.
  static Alphabet Plate();
  // Resolves "hex16", "watermeter" or "plate".
  static Alphabet ByName(const std::string& name);

  const std::string& name() const { return name_; }
  int class_count() const { return static_cast<int>(symbols_.size()); }
  const std::vector<Symbol>& symbols() const { return symbols_; }
  Symbol symbol(int class_index) const;
  bool is_mid_state(int class_index) const { return mid_state_[class_index]; }
  bool watermeter_mode() const;

  std::optional<int> find(Symbol s) const;
  // Throws kMissingClass for symbols outside the alphabet.
  int index_of(Symbol s) const;
  bool contains(Symbol s) const { return find(s).has_value(); }

  std::vector<int> Encode(const SymbolString& label) const;
  SymbolString Decode(const std::vector<int>& classes) const;

 private:
  std::string name_;
  std::vector<Symbol> symbols_;
  std::vector<bool> mid_state_;
};

std::string ToUtf8(const SymbolString& s);
SymbolString FromUtf8(const std::string& s);

}  // namespace superocr

#endif  // SUPEROCR_ALPHABET_HPP_
