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


#include "superocr/alphabet.hpp"

#include <set>

#include "superocr/error.hpp"

namespace superocr {

namespace {

// Province abbreviations found on mainland plates, in a fixed order.
constexpr char32_t kProvinces[] = U"京津沪渝冀豫云辽黑湘皖鲁新苏浙赣鄂桂甘晋蒙陕吉闽贵粤青藏川宁琼";

}  // namespace

Alphabet::Alphabet(std::string name, std::vector<Symbol> symbols,
                   std::vector<bool> mid_state_flags)
    : name_(std::move(name)),
      symbols_(std::move(symbols)),
      mid_state_(std::move(mid_state_flags)) {
  Require(!symbols_.empty(), ErrorKind::kInvalidArgument, "empty alphabet");
  std::set<Symbol> seen(symbols_.begin(), symbols_.end());
  Require(seen.size() == symbols_.size(), ErrorKind::kInvalidArgument,
          "alphabet symbols must be unique");
  if (mid_state_.empty()) mid_state_.assign(symbols_.size(), false);
  Require(mid_state_.size() == symbols_.size(), ErrorKind::kInvalidArgument,
          "mid-state flags must cover every class");
}

Alphabet Alphabet::Hex16() {
  std::vector<Symbol> s;
  for (char32_t c : U"0123456789ABCDEF") {
    if (c) s.push_back(c);
  }
  return Alphabet("hex16", std::move(s));
}

Alphabet Alphabet::Watermeter() {
  std::vector<Symbol> s;
  std::vector<bool> mid;
  for (char32_t c = U'0'; c <= U'9'; ++c) {
    s.push_back(c);
    mid.push_back(false);
  }
  for (char32_t c = U'a'; c <= U'j'; ++c) {
    s.push_back(c);
    mid.push_back(true);
  }
  return Alphabet("watermeter", std::move(s), std::move(mid));
}

Alphabet Alphabet::Plate() {
  std::vector<Symbol> s;
  for (char32_t c : kProvinces) {
    if (c) s.push_back(c);
  }
  for (char32_t c = U'A'; c <= U'Z'; ++c) {
    if (c != U'I' && c != U'O') s.push_back(c);
  }
  for (char32_t c = U'0'; c <= U'9'; ++c) s.push_back(c);
  return Alphabet("plate", std::move(s));
}

Alphabet Alphabet::ByName(const std::string& name) {
  if (name == "hex16") return Hex16();
  if (name == "watermeter") return Watermeter();
  if (name == "plate") return Plate();
  Fail(ErrorKind::kInvalidArgument, "unknown alphabet: " + name);
}

Symbol Alphabet::symbol(int class_index) const {
  Require(class_index >= 0 && class_index < class_count(),
          ErrorKind::kMissingClass,
          "class index out of range: " + std::to_string(class_index));
  return symbols_[class_index];
}

bool Alphabet::watermeter_mode() const {
  for (bool m : mid_state_) {
    if (m) return true;
  }
  return false;
}

std::optional<int> Alphabet::find(Symbol s) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i] == s) return static_cast<int>(i);
  }
  return std::nullopt;
}

int Alphabet::index_of(Symbol s) const {
  auto idx = find(s);
  if (!idx) {
    Fail(ErrorKind::kMissingClass,
         "symbol '" + ToUtf8(SymbolString(1, s)) + "' not in alphabet " + name_);
  }
  return *idx;
}

std::vector<int> Alphabet::Encode(const SymbolString& label) const {
  std::vector<int> out;
  out.reserve(label.size());
  for (Symbol s : label) out.push_back(index_of(s));
  return out;
}

SymbolString Alphabet::Decode(const std::vector<int>& classes) const {
  SymbolString out;
  out.reserve(classes.size());
  for (int c : classes) out.push_back(symbol(c));
  return out;
}

std::string ToUtf8(const SymbolString& s) {
  std::string out;
  for (char32_t c : s) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

SymbolString FromUtf8(const std::string& s) {
  SymbolString out;
  std::size_t i = 0;
  while (i < s.size()) {
    auto b = static_cast<unsigned char>(s[i]);
    int extra = 0;
    char32_t c = 0;
    if (b < 0x80) {
      c = b;
    } else if ((b & 0xE0) == 0xC0) {
      c = b & 0x1F;
      extra = 1;
    } else if ((b & 0xF0) == 0xE0) {
      c = b & 0x0F;
      extra = 2;
    } else if ((b & 0xF8) == 0xF0) {
      c = b & 0x07;
      extra = 3;
    } else {
      Fail(ErrorKind::kFormat, "invalid UTF-8 lead byte");
    }
    if (i + extra >= s.size()) Fail(ErrorKind::kFormat, "truncated UTF-8 sequence");
    for (int k = 1; k <= extra; ++k) {
      auto cont = static_cast<unsigned char>(s[i + k]);
      if ((cont & 0xC0) != 0x80) Fail(ErrorKind::kFormat, "invalid UTF-8 continuation");
      c = (c << 6) | (cont & 0x3F);
    }
    out.push_back(c);
    i += 1 + extra;
  }
  return out;
}

}  // namespace superocr
