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


#ifndef SUPEROCR_TESTS_METRIC_CASES_HPP_
#define SUPEROCR_TESTS_METRIC_CASES_HPP_

#include <string>
#include <vector>

#include "superocr/alphabet.hpp"

namespace superocr::fixtures {

// Hand-counted metric cases. Expected values are two-decimal percentages.
struct MetricCase {
  std::string name;
  std::vector<SymbolString> preds;
  std::vector<SymbolString> labels;
  std::string lcr;
  std::string ar;
};

inline std::vector<SymbolString> U(std::initializer_list<const char*> items) {
  std::vector<SymbolString> out;
  for (const char* s : items) out.push_back(FromUtf8(s));
  return out;
}

inline std::vector<MetricCase> MetricCases() {
  std::vector<MetricCase> cases;
  cases.push_back({"exact", U({"ABCDE"}), U({"ABCDE"}), "100.00", "100.00"});
  cases.push_back({"last char wrong", U({"ABCDF"}), U({"ABCDE"}), "0.00", "80.00"});
  cases.push_back({"thirds", U({"12345", "12345", "00000"}), U({"12345", "12340", "11111"}),
                   "33.33", "60.00"});
  cases.push_back({"eighths", U({"AAAA", "BBBB"}), U({"AAAB", "BBBB"}), "50.00", "87.50"});
  // 1 of 7 lines; 3 + 6 * 1 of 21 chars.
  cases.push_back({"sevenths",
                   U({"ABC", "AXX", "XBX", "XXC", "AYY", "YBY", "YYC"}),
                   U({"ABC", "ABC", "ABC", "ABC", "ABC", "ABC", "ABC"}), "14.29", "42.86"});
  cases.push_back({"single chars", U({"1", "2", "4"}), U({"1", "2", "3"}), "66.67", "66.67"});
  cases.push_back({"all wrong", U({"FFFF"}), U({"0000"}), "0.00", "0.00"});
  cases.push_back({"plates", U({"皖AD1239", "沪B12345"}), U({"皖AD1238", "沪B12345"}), "50.00",
                   "92.86"});
  {
    // 1 of 32 lines (3.125); 2 + 1 of 64 chars (4.6875). Both round up.
    MetricCase c{"half up", {}, {}, "3.13", "4.69"};
    for (int i = 0; i < 32; ++i) {
      c.labels.push_back(U"AB");
      c.preds.push_back(i == 0 ? U"AB" : i == 1 ? U"AX" : U"XY");
    }
    cases.push_back(c);
  }
  cases.push_back({"five of six",
                   U({"0123A", "0123A", "0123A", "0123A", "0123A", "01XXX"}),
                   U({"0123A", "0123A", "0123A", "0123A", "0123A", "0123A"}), "83.33", "90.00"});
  return cases;
}

}  // namespace superocr::fixtures

#endif  // SUPEROCR_TESTS_METRIC_CASES_HPP_
