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


#include <filesystem>
#include <functional>

#include "doctest.h"
#include "superocr/canvas.hpp"
#include "superocr/digest.hpp"
#include "superocr/error.hpp"
#include "superocr/supergen.hpp"
#include "superocr/taskgen.hpp"

using namespace superocr;

namespace {

ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kState;
}

LabeledScene PlateScene(const SymbolString& label) {
  LabeledScene s;
  s.image = Image(120, 40, 1, 180);
  s.label = label;
  s.scene_id = 0xabcdef;
  return s;
}

}  // namespace

TEST_CASE("seven character plate ending in 8") {
  const LayoutSpec layout = LayoutSpec::Ccpd();
  const Alphabet plate = Alphabet::Plate();
  CHECK(plate.class_count() == 65);
  const SymbolString label = U"皖AD1238";
  const auto samples = Expand(PlateScene(label), layout, GlyphFont::Builtin(), plate);
  REQUIRE(samples.size() == 7);
  const PrefixSample& last = samples[6];
  CHECK(last.target_class == plate.index_of(U'8'));
  CHECK(last.prefix_len == 6);
  CHECK(last.image == Compose(PlateScene(label).image, label.substr(0, 6), layout,
                              GlyphFont::Builtin()));
  for (int k = 0; k < 7; ++k) {
    CHECK(samples[k].prefix_len == k);
    CHECK(samples[k].target_class == plate.index_of(label[k]));
    CHECK(samples[k].scene_id == 0xabcdef);
  }
}

TEST_CASE("single character label gives one empty-bottom sample") {
  const LayoutSpec layout = LayoutSpec::Make(40, 40, 30, 0);
  const auto samples = Expand(PlateScene(U"7"), layout, GlyphFont::Builtin(), Alphabet::Hex16());
  REQUIRE(samples.size() == 1);
  for (int y = 30; y < 40; ++y)
    for (int x = 0; x < 40; ++x) CHECK(samples[0].image.at(x, y) == 255);
}

TEST_CASE("expand errors") {
  const LayoutSpec layout = LayoutSpec::Desk();
  const Alphabet hex = Alphabet::Hex16();
  CHECK(KindOf([&] { Expand(PlateScene(U"1234"), layout, GlyphFont::Builtin(), hex); }) ==
        ErrorKind::kInvalidArgument);
  CHECK(KindOf([&] { Expand(PlateScene(U"1234Z"), layout, GlyphFont::Builtin(), hex); }) ==
        ErrorKind::kMissingClass);
}

TEST_CASE("consecutive samples differ only inside the new slot") {
  const LayoutSpec layout = LayoutSpec::Desk();
  const auto scenes = GenSplit(SubsetConfig("clean", TaskConfig{}), 10, 0);
  for (const auto& s : scenes) {
    const auto samples = Expand(s, layout, GlyphFont::Builtin(), Alphabet::Hex16());
    for (int k = 0; k + 1 < 5; ++k) {
      const Rect& slot = layout.slots[k];
      for (int y = 0; y < 96; ++y)
        for (int x = 0; x < 96; ++x) {
          if (!slot.Contains(x, y)) {
            CHECK(samples[k].image.at(x, y) == samples[k + 1].image.at(x, y));
          }
        }
    }
  }
}

TEST_CASE("meter reading from the figure") {
  CHECK(MeterReading({0, 1, 8, 1, 16}) == "01816.5");
  CHECK(MeterReading({10, 0, 0, 0, 0}) == "00000");
  CHECK(MeterReading({0, 0, 0, 0, 10}) == "00000.5");
}

TEST_CASE("meter reading: every class at the end and elsewhere") {
  // Hand-written table: reading of class c in the last position.
  const char* end[20] = {"0",   "1",   "2",   "3",   "4",   "5",   "6",
                         "7",   "8",   "9",   "0.5", "1.5", "2.5", "3.5",
                         "4.5", "5.5", "6.5", "7.5", "8.5", "9.5"};
  // Reading of class c anywhere else.
  const char* mid[20] = {"0", "1", "2", "3", "4", "5", "6", "7", "8", "9",
                         "0", "1", "2", "3", "4", "5", "6", "7", "8", "9"};
  for (int c = 0; c < 20; ++c) {
    CAPTURE(c);
    CHECK(MeterReading({3, 3, 3, 3, c}) == std::string("3333") + end[c]);
    for (int pos = 0; pos < 4; ++pos) {
      std::vector<int> cls(5, 2);
      cls[pos] = c;
      std::string want = "22222";
      want[pos] = mid[c][0];
      CHECK(MeterReading(cls) == want);
    }
  }
  // Several mid-states, each by its own position.
  CHECK(MeterReading({11, 12, 3, 19, 19}) == "12399.5");
}

TEST_CASE("meter reading errors and suffix property") {
  CHECK(KindOf([] { MeterReading({0, 1, 2, 3}); }) == ErrorKind::kInvalidArgument);
  CHECK(KindOf([] { MeterReading({0, 1, 2, 3, 20}); }) == ErrorKind::kInvalidArgument);
  CHECK(KindOf([] { MeterReading({0, -1, 2, 3, 4}); }) == ErrorKind::kInvalidArgument);
  for (int c = 0; c < 20; ++c) {
    const std::string r = MeterReading({c, c, c, c, c});
    CHECK(r.size() == (c >= 10 ? 7u : 5u));
  }
}

TEST_CASE("watermeter alphabet flags") {
  const Alphabet wm = Alphabet::Watermeter();
  CHECK(wm.class_count() == 20);
  CHECK(wm.watermeter_mode());
  for (int c = 0; c < 20; ++c) CHECK(wm.is_mid_state(c) == (c >= 10));
  CHECK(wm.symbol(16) == U'g');
  const Alphabet hex = Alphabet::Hex16();
  CHECK_FALSE(hex.watermeter_mode());
  for (int c = 0; c < 16; ++c) CHECK_FALSE(hex.is_mid_state(c));
  CHECK(KindOf([&] { hex.symbol(16); }) == ErrorKind::kMissingClass);
}

TEST_CASE("training set counts, histogram and byte-identical rebuild") {
  const auto scenes = GenSplit(SubsetConfig("clean", TaskConfig{}), 100, 0);
  const LayoutSpec layout = LayoutSpec::Desk();
  const SampleArchive a = BuildTrainingSet(scenes, layout, GlyphFont::Builtin(), Alphabet::Hex16());
  CHECK(a.size() == 500);
  std::size_t total = 0;
  for (auto n : a.ClassHistogram()) total += n;
  CHECK(total == 500);
  const SampleArchive b = BuildTrainingSet(scenes, layout, GlyphFont::Builtin(), Alphabet::Hex16());
  CHECK(Sha256Hex(a.Serialize()) == Sha256Hex(b.Serialize()));
}

TEST_CASE("training set errors name the scene") {
  auto scenes = GenSplit(SubsetConfig("clean", TaskConfig{}), 3, 0);
  scenes[1].label = U"12";
  try {
    BuildTrainingSet(scenes, LayoutSpec::Desk(), GlyphFont::Builtin(), Alphabet::Hex16());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(SceneIdHex(scenes[1].scene_id)) != std::string::npos);
  }
}

TEST_CASE("sample archive round trip and format errors") {
  const auto scenes = GenSplit(SubsetConfig("tilt", TaskConfig{}), 4, 0);
  const SampleArchive a =
      BuildTrainingSet(scenes, LayoutSpec::Desk(), GlyphFont::Builtin(), Alphabet::Hex16());
  const auto bytes = a.Serialize();
  // Header is 4 + 1 + 2 + 2 + 1 + 2 + 4 bytes; each sample 3 + pixels.
  CHECK(bytes.size() == 16 + 20 * (3 + 96 * 96));
  CHECK(bytes[0] == 'S');
  CHECK(bytes[4] == 1);
  const SampleArchive b = SampleArchive::Deserialize(bytes);
  CHECK(b.Serialize() == bytes);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(b.image(i) == a.image(i));
    CHECK(b.target(i) == a.target(i));
    CHECK(b.prefix_len(i) == a.prefix_len(i));
  }
  auto bad = bytes;
  bad[0] = 'X';
  CHECK(KindOf([&] { SampleArchive::Deserialize(bad); }) == ErrorKind::kFormat);
  bad = bytes;
  bad[4] = 2;
  CHECK(KindOf([&] { SampleArchive::Deserialize(bad); }) == ErrorKind::kFormat);
  bad = bytes;
  bad.pop_back();
  CHECK(KindOf([&] { SampleArchive::Deserialize(bad); }) == ErrorKind::kFormat);
  bad = bytes;
  bad.push_back(0);
  CHECK(KindOf([&] { SampleArchive::Deserialize(bad); }) == ErrorKind::kFormat);
}
