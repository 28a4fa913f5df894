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


// superocr: command-line entry point.
//
//   superocr gen      --config C --subset S --count N --out DIR
//   superocr expand   --config C --dataset DIR --out FILE
//   superocr train    --config C --samples FILE [--val FILE] --out DIR
//   superocr decode   --config C (--checkpoint F | --qmodel F [--device EP] | --oracle)
//                     (--dataset DIR | --image PGM) --out FILE [--watermeter]
//   superocr eval     --config C <classifier> --subset NAME=DIR ... --out DIR
//   superocr quantize --config C --checkpoint F --calib FILE --out FILE
//   superocr serve-device --qmodel F --bind EP [--sessions N]

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "superocr/decoder.hpp"
#include "superocr/error.hpp"
#include "superocr/eval.hpp"
#include "superocr/experiment.hpp"
#include "superocr/quant.hpp"
#include "superocr/supergen.hpp"
#include "superocr/taskgen.hpp"
#include "superocr/train.hpp"
#include "superocr/wire.hpp"

namespace fs = std::filesystem;
using namespace superocr;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;

  ExperimentConfig Load() const {
    ExperimentConfig cfg = ExperimentConfig::Load(config);
    if (seed) {
      cfg.seed = *seed;
      cfg.optim.seed = *seed;
    }
    return cfg;
  }
};

void AddCommon(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "experiment config (key=value)")->required();
  cmd->add_option("--seed", c.seed, "override the config seed");
}

// Output path plus the directory that holds its artifact manifest.
std::pair<std::string, std::string> Split(const std::string& out) {
  fs::path p = fs::path(out).lexically_normal();
  if (p.filename().empty()) p = p.parent_path();
  fs::path dir = p.parent_path();
  if (dir.empty()) dir = ".";
  fs::create_directories(dir);
  return {dir.string(), p.filename().string()};
}

void Record(const std::string& out) {
  const auto [dir, name] = Split(out);
  std::cout << name << "\t" << RecordArtifact(dir, name) << "\n";
}

// Answers with the next label character; the caller names the scene.
class LabelOracle : public Classifier {
 public:
  explicit LabelOracle(const Alphabet& alphabet) : alphabet_(alphabet) {}
  void Expect(const SymbolString& label) {
    label_ = label;
    step_ = 0;
  }
  int class_count() const override { return alphabet_.class_count(); }
  std::vector<float> Scores(const Image&) override {
    Require(step_ < label_.size(), ErrorKind::kState, "oracle queried past the label end");
    std::vector<float> s(class_count(), 0.0f);
    s[alphabet_.index_of(label_[step_++])] = 1.0f;
    return s;
  }

 private:
  const Alphabet& alphabet_;
  SymbolString label_;
  std::size_t step_ = 0;
};

struct ModelFlags {
  std::string checkpoint, qmodel, device;
  bool oracle = false;

  void Add(CLI::App* cmd) {
    auto* ck = cmd->add_option("--checkpoint", checkpoint, "float model checkpoint");
    auto* q = cmd->add_option("--qmodel", qmodel, "quantized model");
    auto* o = cmd->add_flag("--oracle", oracle, "ground-truth classifier");
    cmd->add_option("--device", device, "device endpoint HOST:PORT or unix:PATH")->needs(q);
    ck->excludes(q)->excludes(o);
    q->excludes(o);
  }
};

// Owns whichever classifier the flags select.
struct ModelStack {
  Network net;
  QuantNetwork qnet;
  std::unique_ptr<SocketStream> conn;
  std::unique_ptr<DeviceEmulator> emulator;
  std::unique_ptr<DeviceChannel> channel;
  std::unique_ptr<Classifier> clf;
  LabelOracle* oracle = nullptr;

  ModelStack(const ModelFlags& f, const Alphabet& alphabet) {
    if (f.oracle) {
      auto o = std::make_unique<LabelOracle>(alphabet);
      oracle = o.get();
      clf = std::move(o);
    } else if (!f.checkpoint.empty()) {
      net = LoadCheckpoint(f.checkpoint);
      clf = std::make_unique<NetworkClassifier>(net);
    } else if (!f.qmodel.empty()) {
      qnet = LoadQuantNetwork(f.qmodel);
      if (f.device.empty()) {
        clf = std::make_unique<QuantClassifier>(qnet);
      } else {
        conn = Connect(f.device);
        channel = std::make_unique<StreamChannel>(*conn);
        clf = std::make_unique<DeviceClassifier>(*channel, qnet);
      }
    } else {
      Fail(ErrorKind::kInvalidArgument, "one of --checkpoint, --qmodel or --oracle is required");
    }
    Require(clf->class_count() == alphabet.class_count(), ErrorKind::kInvalidArgument,
            "model has " + std::to_string(clf->class_count()) + " classes, alphabet has " +
                std::to_string(alphabet.class_count()));
  }
};

int CmdGen(const Common& c, const std::string& subset, std::int64_t count, std::int64_t offset,
           const std::string& out, int workers) {
  const ExperimentConfig cfg = c.Load();
  Require(count >= 1 && offset >= 0, ErrorKind::kInvalidArgument, "count must be >= 1");
  const auto scenes = GenSplit(cfg.Subset(subset), count, offset, workers);
  WriteDataset(out, scenes);
  Record(out);
  return 0;
}

int CmdExpand(const Common& c, const std::string& dataset, const std::string& out) {
  const ExperimentConfig cfg = c.Load();
  const auto scenes = ReadDataset(dataset);
  const SampleArchive archive =
      BuildTrainingSet(scenes, cfg.Layout(), GlyphFont::Builtin(), cfg.MakeAlphabet());
  archive.Save(out);
  std::cerr << "scenes " << scenes.size() << " samples " << archive.size() << "\n";
  Record(out);
  return 0;
}

int CmdTrain(const Common& c, const std::string& samples, const std::string& val,
             const std::string& out) {
  const ExperimentConfig cfg = c.Load();
  const SampleArchive train = SampleArchive::Load(samples);
  std::optional<SampleArchive> val_set;
  if (!val.empty()) val_set = SampleArchive::Load(val);
  fs::create_directories(out);
  {
    std::ofstream cf(fs::path(out) / "config.txt", std::ios::binary);
    cf << cfg.ToText();
  }
  TrainOptions opts = cfg.Options();
  opts.on_row = [](const CurveRow& r) {
    std::cerr << "iter " << r.iter << " loss " << r.loss;
    if (r.val_acc) std::cerr << " val_acc " << *r.val_acc;
    std::cerr << "\n";
  };
  try {
    const TrainResult r =
        TrainLoop(train, cfg.MakeNetwork(), cfg.optim, val_set ? &*val_set : nullptr, opts);
    SaveCheckpoint(r.final_net, (fs::path(out) / "model.ckpt").string());
    SaveCheckpoint(r.best_net, (fs::path(out) / "best.ckpt").string());
    std::ofstream(fs::path(out) / "curves.csv", std::ios::binary) << r.curve.ToCsv();
  } catch (const TrainingDiverged& d) {
    SaveCheckpoint(d.last_good(), (fs::path(out) / "last_good.ckpt").string());
    RecordArtifact(out, "last_good.ckpt");
    throw;
  }
  for (const char* name : {"config.txt", "model.ckpt", "best.ckpt", "curves.csv"}) {
    std::cout << name << "\t" << RecordArtifact(out, name) << "\n";
  }
  return 0;
}

struct DecodeInput {
  std::string id;
  Image image;
  SymbolString label;
};

int CmdDecode(const Common& c, const ModelFlags& mf, const std::string& dataset,
              const std::string& image, const std::string& out, bool watermeter) {
  const ExperimentConfig cfg = c.Load();
  const Alphabet alphabet = cfg.MakeAlphabet();
  const LayoutSpec layout = cfg.Layout();
  Require(dataset.empty() != image.empty(), ErrorKind::kInvalidArgument,
          "give exactly one of --dataset or --image");
  std::vector<DecodeInput> inputs;
  if (!dataset.empty()) {
    for (auto& s : ReadDataset(dataset)) inputs.push_back({SceneIdHex(s.scene_id), s.image, s.label});
  } else {
    Require(!mf.oracle, ErrorKind::kInvalidArgument, "--oracle needs a labeled --dataset");
    inputs.push_back({fs::path(image).stem().string(), ReadPnm(image), {}});
  }
  ModelStack model(mf, alphabet);
  std::ostringstream lines;
  for (const auto& in : inputs) {
    if (model.oracle) model.oracle->Expect(in.label);
    const SymbolString pred =
        Decode(in.image, *model.clf, layout, GlyphFont::Builtin(), alphabet, cfg.string_len);
    lines << in.id << '\t' << ToUtf8(pred);
    if (watermeter) lines << '\t' << MeterReading(alphabet.Encode(pred));
    lines << '\n';
  }
  Split(out);
  std::ofstream f(out, std::ios::binary);
  Require(static_cast<bool>(f), ErrorKind::kIo, "cannot write " + out);
  f << lines.str();
  f.close();
  Record(out);
  return 0;
}

int CmdEval(const Common& c, const ModelFlags& mf, const std::vector<std::string>& subsets,
            const std::string& curves, const std::string& out) {
  const ExperimentConfig cfg = c.Load();
  const Alphabet alphabet = cfg.MakeAlphabet();
  Require(!subsets.empty(), ErrorKind::kInvalidArgument, "at least one --subset NAME=DIR");
  SubsetMap map;
  for (const auto& s : subsets) {
    const auto eq = s.find('=');
    Require(eq != std::string::npos && eq > 0, ErrorKind::kInvalidArgument,
            "--subset wants NAME=DIR, got " + s);
    map.push_back({s.substr(0, eq), ReadDataset(s.substr(eq + 1))});
  }
  ModelStack model(mf, alphabet);
  EvalResult result;
  if (model.oracle) {
    // Per-scene so the oracle knows which label to replay.
    for (const auto& [name, scenes] : map) {
      for (const auto& sc : scenes) {
        model.oracle->Expect(sc.label);
        result.Merge(EvaluateSubsets(*model.clf, {{name, {sc}}}, cfg.Layout(),
                                     GlyphFont::Builtin(), alphabet));
      }
    }
  } else {
    result = EvaluateSubsets(*model.clf, map, cfg.Layout(), GlyphFont::Builtin(), alphabet);
  }
  CurveLog curve;
  if (!curves.empty()) {
    std::ifstream in(curves, std::ios::binary);
    Require(static_cast<bool>(in), ErrorKind::kIo, "cannot read " + curves);
    std::stringstream ss;
    ss << in.rdbuf();
    curve = CurveLog::FromCsv(ss.str());
  }
  EmitReport(result, curve, out);
  std::cout << MetricsCsv(result);
  for (const char* name : {"metrics.csv", "curves.csv", "curves.svg"}) RecordArtifact(out, name);
  return 0;
}

int CmdQuantize(const Common& c, const std::string& checkpoint, const std::string& calib,
                const std::string& out) {
  const ExperimentConfig cfg = c.Load();
  const Network net = LoadCheckpoint(checkpoint);
  const SampleArchive archive = SampleArchive::Load(calib);
  Require(!archive.empty(), ErrorKind::kInvalidArgument, "calibration archive is empty");
  // Evenly spaced samples cover every prefix length.
  const std::size_t n = std::min<std::size_t>(archive.size(), cfg.calib_samples);
  std::vector<Image> images;
  for (std::size_t i = 0; i < n; ++i) images.push_back(archive.image(i * archive.size() / n));
  SaveQuantNetwork(QuantizeModel(net, images), out);
  Record(out);
  return 0;
}

int CmdServe(const std::string& qmodel, const std::string& bind, int sessions) {
  const QuantNetwork q = LoadQuantNetwork(qmodel);
  const DeviceEmulator device(q);
  StreamListener listener(bind);
  std::cout << "listening " << listener.endpoint() << std::endl;
  for (int served = 0; sessions <= 0 || served < sessions; ++served) {
    auto conn = listener.Accept();
    try {
      device.Serve(*conn);
    } catch (const Error& e) {
      std::cerr << "session ended: " << e.what() << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SuperOCR experiments"};
  app.require_subcommand(1);

  Common common;
  std::string out, dataset, image, samples, val, checkpoint, calib, curves, subset, qmodel, bind;
  std::vector<std::string> eval_subsets;
  std::int64_t count = 0, offset = 0;
  int workers = 1, sessions = 0;
  bool watermeter = false;
  ModelFlags model;

  auto* gen = app.add_subcommand("gen", "generate a labeled scene dataset");
  AddCommon(gen, common);
  gen->add_option("--subset", subset, "clean|rotate|tilt|weather|db|fn|train")->required();
  gen->add_option("--count", count)->required();
  gen->add_option("--offset", offset, "first scene index");
  gen->add_option("--workers", workers);
  gen->add_option("--out", out)->required();

  auto* expand = app.add_subcommand("expand", "expand scenes into prefix samples");
  AddCommon(expand, common);
  expand->add_option("--dataset", dataset)->required();
  expand->add_option("--out", out)->required();

  auto* train = app.add_subcommand("train", "train the classifier");
  AddCommon(train, common);
  train->add_option("--samples", samples)->required();
  train->add_option("--val", val, "validation sample archive");
  train->add_option("--out", out)->required();

  auto* decode = app.add_subcommand("decode", "decode scenes");
  AddCommon(decode, common);
  model.Add(decode);
  decode->add_option("--dataset", dataset);
  decode->add_option("--image", image, "single PGM scene");
  decode->add_option("--out", out)->required();
  decode->add_flag("--watermeter", watermeter, "append the meter reading");

  auto* eval = app.add_subcommand("eval", "evaluate on subsets");
  AddCommon(eval, common);
  model.Add(eval);
  eval->add_option("--subset", eval_subsets, "NAME=DATASET_DIR")->required();
  eval->add_option("--curves", curves, "training curves.csv");
  eval->add_option("--out", out)->required();

  auto* quantize = app.add_subcommand("quantize", "int8 post-training quantization");
  AddCommon(quantize, common);
  quantize->add_option("--checkpoint", checkpoint)->required();
  quantize->add_option("--calib", calib, "sample archive")->required();
  quantize->add_option("--out", out)->required();

  auto* serve = app.add_subcommand("serve-device", "run the coprocessor emulator");
  serve->add_option("--qmodel", qmodel)->required();
  serve->add_option("--bind", bind, "HOST:PORT or unix:PATH")->required();
  serve->add_option("--sessions", sessions, "stop after this many connections");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) return CmdGen(common, subset, count, offset, out, workers);
    if (*expand) return CmdExpand(common, dataset, out);
    if (*train) return CmdTrain(common, samples, val, out);
    if (*decode) return CmdDecode(common, model, dataset, image, out, watermeter);
    if (*eval) return CmdEval(common, model, eval_subsets, curves, out);
    if (*quantize) return CmdQuantize(common, checkpoint, calib, out);
    if (*serve) return CmdServe(qmodel, bind, sessions);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
