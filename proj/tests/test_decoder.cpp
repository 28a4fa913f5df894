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


#include <functional>

#include "doctest.h"
#include "oracles.hpp"
#include "superocr/decoder.hpp"
#include "superocr/error.hpp"
#include "superocr/eval.hpp"
#include "superocr/taskgen.hpp"

using namespace superocr;

namespace {

struct Fixture {
  LayoutSpec layout = LayoutSpec::Desk();
  const GlyphFont& font = GlyphFont::Builtin();
  Alphabet alphabet = Alphabet::Hex16();
  std::vector<LabeledScene> scenes = GenSplit(SubsetConfig("clean", TaskConfig{}), 30, 0);
};

// Knows the labels; answers correctly only while the drawn prefix is right,
// and misreads position 2 of every third scene.
class FlakyClassifier : public Classifier {
 public:
  explicit FlakyClassifier(const Fixture& f) : f_(f) {}
  int class_count() const override { return f_.alphabet.class_count(); }
  std::vector<float> Scores(const Image& canvas) override {
    std::vector<float> s(class_count(), 0.0f);
    for (std::size_t i = 0; i < f_.scenes.size(); ++i) {
      const LabeledScene& sc = f_.scenes[i];
      const Image blank = oracle::NaiveCompose(sc.image, U"", f_.layout, f_.font);
      bool same_scene = true;
      for (int y = 0; y < f_.layout.scene_region.h && same_scene; ++y)
        for (int x = 0; x < f_.layout.canvas_w && same_scene; ++x)
          same_scene = blank.at(x, y) == canvas.at(x, y);
      if (!same_scene) continue;
      int step = 0;
      for (const Rect& r : f_.layout.slots) {
        bool filled = false;
        for (int y = r.y; y < r.y + r.h && !filled; ++y)
          for (int x = r.x; x < r.x + r.w && !filled; ++x) filled = canvas.at(x, y) != f_.layout.bg;
        step += filled;
      }
      const bool prefix_ok =
          canvas == oracle::NaiveCompose(sc.image, sc.label.substr(0, step), f_.layout, f_.font);
      int cls = prefix_ok ? f_.alphabet.index_of(sc.label[step]) : 0;
      if (step == 2 && i % 3 == 0) cls = (cls + 1) % class_count();
      s[cls] = 1.0f;
      return s;
    }
    FAIL("unknown scene");
    return s;
  }

 private:
  const Fixture& f_;
};

class FixedClassifier : public Classifier {
 public:
  FixedClassifier(int classes, std::vector<float> scores) : classes_(classes), scores_(scores) {}
  int class_count() const override { return classes_; }
  std::vector<float> Scores(const Image&) override {
    ++calls;
    return scores_;
  }
  int calls = 0;

 private:
  int classes_;
  std::vector<float> scores_;
};

}  // namespace

TEST_CASE("oracle classifier closes the loop") {
  Fixture f;
  oracle::OracleClassifier clf(f.alphabet, f.layout, f.font);
  for (const auto& s : f.scenes) clf.Add(s);
  for (const auto& s : f.scenes) {
    clf.Expect(s.scene_id);
    CHECK(Decode(s.image, clf, f.layout, f.font, f.alphabet, 5) == s.label);
  }
  CHECK(clf.calls() == 5 * static_cast<int>(f.scenes.size()));
  CHECK(clf.inconsistencies() == 0);
}

TEST_CASE("intermediate canvases equal direct composition") {
  Fixture f;
  Network net = Network::SuperNetS(1, 96, 96, 16);
  net.InitHe(4);
  // Random output layer so predictions vary.
  for (std::size_t i = 0; i < net.params().back().weight.size(); ++i) {
    net.params().back().weight[i] = static_cast<float>((i * 7919 % 201) - 100) * 1e-3f;
  }
  NetworkClassifier clf(net);
  for (int t = 0; t < 10; ++t) {
    const LabeledScene& s = f.scenes[t];
    std::vector<DecodeState> seen;
    const SymbolString out = Decode(s.image, clf, f.layout, f.font, f.alphabet, 5,
                                    [&](const DecodeState& st) { seen.push_back(st); });
    REQUIRE(seen.size() == 5);
    for (int k = 0; k < 5; ++k) {
      CHECK(seen[k].step == k);
      CHECK(seen[k].predicted == out.substr(0, k));
      CHECK(seen[k].canvas == Compose(s.image, out.substr(0, k), f.layout, f.font));
      CHECK(seen[k].canvas == oracle::NaiveCompose(s.image, out.substr(0, k), f.layout, f.font));
    }
  }
}

TEST_CASE("classifier is called exactly N times and ties go to the lowest index") {
  Fixture f;
  FixedClassifier clf(16, std::vector<float>(16, 1.0f));
  CHECK(Decode(f.scenes[0].image, clf, f.layout, f.font, f.alphabet, 5) == U"00000");
  CHECK(clf.calls == 5);
  std::vector<float> s(16, 0.0f);
  s[11] = 2.0f;
  s[12] = 2.0f;
  FixedClassifier b(16, s);
  CHECK(Decode(f.scenes[0].image, b, f.layout, f.font, f.alphabet, 5) == U"BBBBB");
  CHECK(ArgMax({0.5f, 0.5f}) == 0);
}

TEST_CASE("length one decodes the bare scene") {
  Fixture f;
  const LayoutSpec one = LayoutSpec::Make(96, 96, 64, 0);
  FixedClassifier clf(16, [] {
    std::vector<float> s(16, 0.0f);
    s[7] = 1.0f;
    return s;
  }());
  std::vector<Image> canvases;
  CHECK(Decode(f.scenes[0].image, clf, one, f.font, f.alphabet, 1,
               [&](const DecodeState& st) { canvases.push_back(st.canvas); }) == U"7");
  CHECK(canvases.size() == 1);
  CHECK(clf.calls == 1);
}

TEST_CASE("decode errors") {
  Fixture f;
  FixedClassifier ok(16, std::vector<float>(16, 0.0f));
  CHECK_THROWS_AS(Decode(f.scenes[0].image, ok, f.layout, f.font, f.alphabet, 4), Error);
  try {
    Decode(f.scenes[0].image, ok, f.layout, f.font, f.alphabet, 6);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidArgument);
  }
  FixedClassifier wrong_count(15, std::vector<float>(15, 0.0f));
  try {
    Decode(f.scenes[0].image, wrong_count, f.layout, f.font, f.alphabet, 5);
    FAIL("expected a contract error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kContract);
  }
  // Declares 16 classes but returns 3 scores.
  FixedClassifier liar(16, std::vector<float>(3, 0.0f));
  try {
    Decode(f.scenes[0].image, liar, f.layout, f.font, f.alphabet, 5);
    FAIL("expected a contract error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kContract);
  }
}

TEST_CASE("teacher forcing with the oracle is perfect") {
  Fixture f;
  oracle::OracleClassifier clf(f.alphabet, f.layout, f.font);
  for (const auto& s : f.scenes) clf.Add(s);
  const TeacherForcedReport r = TeacherForcedAccuracy(f.scenes, clf, f.layout, f.font, f.alphabet);
  CHECK(r.overall == 1.0);
  for (double p : r.per_position) CHECK(p == 1.0);
}

TEST_CASE("teacher forcing bounds free-running accuracy") {
  Fixture f;
  FlakyClassifier clf(f);
  const TeacherForcedReport tf = TeacherForcedAccuracy(f.scenes, clf, f.layout, f.font, f.alphabet);
  std::vector<SymbolString> preds, labels;
  for (const auto& s : f.scenes) {
    preds.push_back(Decode(s.image, clf, f.layout, f.font, f.alphabet, 5));
    labels.push_back(s.label);
  }
  const auto [lcr, ar] = LcrAr(preds, labels);
  CHECK(tf.per_position[2] == doctest::Approx(20.0 / 30.0));
  CHECK(tf.per_position[0] == 1.0);
  CHECK(tf.overall * 100.0 >= ar);
  CHECK(ar < 100.0);
  CHECK(lcr == doctest::Approx(100.0 * 20 / 30));
}

TEST_CASE("position one of teacher forcing is plain scene classification") {
  Fixture f;
  Network net = Network::SuperNetS(1, 96, 96, 16);
  net.InitHe(8);
  for (std::size_t i = 0; i < net.params().back().weight.size(); ++i) {
    net.params().back().weight[i] = static_cast<float>((i * 104729 % 301) - 150) * 1e-3f;
  }
  NetworkClassifier clf(net);
  const TeacherForcedReport tf = TeacherForcedAccuracy(f.scenes, clf, f.layout, f.font, f.alphabet);
  int hits = 0;
  for (const auto& s : f.scenes) {
    const auto scores = clf.Scores(Compose(s.image, U"", f.layout, f.font));
    hits += f.alphabet.symbol(ArgMax(scores)) == s.label[0];
  }
  CHECK(tf.per_position[0] == doctest::Approx(static_cast<double>(hits) / f.scenes.size()));
}
