#include "subevent/cli/commands.h"

#include <filesystem>
#include <fstream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "subevent/cli/gradcheck.h"
#include "subevent/cli/run_config.h"
#include "subevent/errors.h"
#include "subevent/evalkit/burst.h"
#include "subevent/evalkit/metrics.h"
#include "subevent/ingest/io.h"
#include "subevent/labeler/model_io.h"
#include "subevent/labeler/trainer.h"
#include "subevent/synth/generator.h"

namespace subevent::cli {
namespace {

namespace fs = std::filesystem;
using evalkit::Aggregation;
using evalkit::LabelScheme;
using evalkit::Protocol;
using nlohmann::ordered_json;

template <typename Fn>
int Guard(std::ostream &err, Fn &&body) {
  try {
    return body();
  } catch (const ConfigError &e) {
    fmt::print(err, "config error: {}\n", e.what());
  } catch (const AnnotationError &e) {
    fmt::print(err, "annotation error: {}\n", e.what());
  } catch (const ParseError &e) {
    fmt::print(err, "parse error: {}\n", e.what());
  } catch (const fs::filesystem_error &e) {
    fmt::print(err, "filesystem error: {}\n", e.what());
  } catch (const std::exception &e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitVerificationFailed;
  }
  return kExitUsage;
}

RunConfig Resolve(const CommonOptions &common) {
  return LoadRunConfig(common.config_file, common.overrides);
}

std::vector<ingest::RawStream> LoadDir(const std::string &dir, const char *what) {
  if (dir.empty()) throw ConfigError(fmt::format("no {} directory given", what));
  if (!fs::is_directory(dir)) throw ConfigError(fmt::format("{} directory '{}' does not exist", what, dir));
  auto streams = ingest::LoadRawDataset(dir);
  if (streams.empty()) throw ConfigError(fmt::format("{} directory '{}' holds no streams", what, dir));
  return streams;
}

void SaveSplit(const fs::path &dir, std::span<const ingest::RawStream> streams) {
  fs::create_directories(dir);
  for (const auto &s : streams) ingest::SaveRawStream(dir, s);
}

void ReportDiscarded(std::ostream &err, std::size_t discarded) {
  fmt::print(err, "discarded {} tweets outside their stream window\n", discarded);
}

std::vector<ingest::StreamExample> Examples(std::span<const ingest::RawStream> raw,
                                            const ingest::Vocab &vocab, const LabelScheme &scheme,
                                            std::ostream &err) {
  std::vector<ingest::StreamExample> out;
  std::size_t total = 0;
  for (const auto &r : raw) {
    std::size_t discarded = 0;
    try {
      out.push_back(ingest::BuildExample(r, vocab, scheme, &discarded));
    } catch (const AnnotationError &e) {
      throw AnnotationError(fmt::format("stream '{}': {}", r.annotation.stream_id, e.what()));
    }
    total += discarded;
  }
  ReportDiscarded(err, total);
  return out;
}

// Gold spans and binary predictions for the binary event protocol.
struct BinaryView {
  std::vector<std::vector<evalkit::SubEventSpan>> gold;
  std::vector<std::vector<int>> predicted;
};

ordered_json Reports(const std::vector<Protocol> &protocols, const std::vector<Aggregation> &aggs,
                     const std::function<evalkit::EvalReport(Protocol, Aggregation)> &eval, bool array) {
  ordered_json reports = ordered_json::array();
  for (Protocol p : protocols) {
    for (Aggregation a : aggs) reports.push_back(eval(p, a).ToJson());
  }
  return array ? reports : reports.front();
}

}  // namespace

int CmdGenerate(const GenerateOptions &options, std::ostream &out, std::ostream &err) {
  return Guard(err, [&] {
    RunConfig config = Resolve(options.common);
    if (!options.out_dir.empty()) config.out_dir = options.out_dir;
    if (config.out_dir.empty()) throw ConfigError("generate needs an output directory (--out)");
    config.Validate();
    const fs::path root = config.out_dir;
    if (fs::exists(root) && !fs::is_directory(root)) {
      throw ConfigError(fmt::format("output path '{}' is not a directory", root.string()));
    }

    const auto streams = synth::Generate(config.synth);
    const std::span<const ingest::RawStream> all(streams);
    const std::size_t n_test = streams.size() - config.n_train - config.n_dev;
    SaveSplit(root / "train", all.subspan(0, config.n_train));
    SaveSplit(root / "dev", all.subspan(config.n_train, config.n_dev));
    SaveSplit(root / "test", all.subspan(config.n_train + config.n_dev));
    WriteResolvedConfig(root, config);

    ordered_json summary;
    summary["out_dir"] = root.string();
    summary["train"] = config.n_train;
    summary["dev"] = config.n_dev;
    summary["test"] = n_test;
    out << summary.dump(2) << '\n';
    return kExitOk;
  });
}

int CmdTrain(const TrainOptions &options, std::ostream &out, std::ostream &err) {
  return Guard(err, [&] {
    if (!options.resume.empty()) {
      throw ConfigError("resuming from a checkpoint is not supported; training is single-shot");
    }
    RunConfig config = Resolve(options.common);
    if (!options.train_dir.empty()) config.train_dir = options.train_dir;
    if (!options.dev_dir.empty()) config.dev_dir = options.dev_dir;
    if (!options.out_dir.empty()) config.out_dir = options.out_dir;
    if (config.out_dir.empty()) throw ConfigError("train needs an output directory (--out)");
    config.model.Validate();

    const auto train = LoadDir(config.train_dir, "training");
    const auto dev = config.dev_dir.empty() ? std::vector<ingest::RawStream>{}
                                            : LoadDir(config.dev_dir, "dev");
    labeler::PreparedData data = labeler::Prepare(config.model, train, dev);
    ReportDiscarded(err, data.discarded);
    fmt::print(err, "training {} on {} streams (dev {}), vocabulary {}, {} labels\n",
               encoders::ToString(config.model.encoder.variant), data.train.size(), data.dev.size(),
               data.initial.vocab.size(), config.model.NumClasses(data.initial.scheme));
    labeler::TrainResult result =
        labeler::Train(std::move(data.initial), data.train, data.dev, &err);

    const fs::path dir = config.out_dir;
    labeler::SaveModel(dir, result.model);
    std::ofstream csv(dir / "learning_curve.csv", std::ios::binary);
    labeler::WriteLearningCurve(csv, result.curve);
    WriteResolvedConfig(dir, config);

    ordered_json summary;
    summary["out_dir"] = dir.string();
    summary["epochs_run"] = result.curve.size();
    summary["best_epoch"] = result.best_epoch;
    summary["best_dev_f1"] = result.best_dev_f1;
    out << summary.dump(2) << '\n';
    return kExitOk;
  });
}

int CmdEval(const EvalOptions &options, std::ostream &out, std::ostream &err) {
  return Guard(err, [&] {
    const RunConfig config = Resolve(options.common);
    const Aggregation agg = evalkit::ParseAggregation(options.aggregation);
    const std::vector<Aggregation> aggs =
        options.all ? std::vector<Aggregation>{Aggregation::kMicro, Aggregation::kMacro}
                    : std::vector<Aggregation>{agg};
    const auto raw = LoadDir(options.data_dir, "data");

    if (options.baseline == "burst") {
      if (!options.model_dir.empty()) throw ConfigError("--baseline and --model are exclusive");
      if (!options.protocol.empty() && evalkit::ParseProtocol(options.protocol) != Protocol::kBinaryEvent) {
        throw ConfigError("the burst baseline only supports the binary-event protocol");
      }
      const auto examples = Examples(raw, ingest::Vocab(), ingest::BuildLabelScheme(raw), err);
      BinaryView view;
      for (const auto &s : examples) {
        view.gold.push_back(s.spans);
        view.predicted.push_back(evalkit::BurstBaseline(s.TweetCounts(), config.burst));
      }
      out << Reports({Protocol::kBinaryEvent}, aggs,
                     [&](Protocol, Aggregation a) {
                       return evalkit::EvalBinaryEvent(view.gold, view.predicted, a);
                     },
                     options.all)
                 .dump(2)
          << '\n';
      return kExitOk;
    }
    if (!options.baseline.empty()) throw ConfigError(fmt::format("unknown baseline '{}'", options.baseline));
    if (options.model_dir.empty()) throw ConfigError("eval needs --model or --baseline burst");

    labeler::Model model = labeler::LoadModel(options.model_dir);
    const auto examples = Examples(raw, model.vocab, model.scheme, err);

    if (model.config.head == labeler::Head::kBinary) {
      if (!options.protocol.empty() && evalkit::ParseProtocol(options.protocol) != Protocol::kBinaryEvent) {
        throw ConfigError("a binary-head model only supports the binary-event protocol");
      }
      BinaryView view;
      for (const auto &s : examples) {
        view.gold.push_back(s.spans);
        view.predicted.push_back(labeler::PredictBinary(model, s));
      }
      out << Reports({Protocol::kBinaryEvent}, aggs,
                     [&](Protocol, Aggregation a) {
                       return evalkit::EvalBinaryEvent(view.gold, view.predicted, a);
                     },
                     options.all)
                 .dump(2)
          << '\n';
      return kExitOk;
    }

    std::vector<std::vector<int>> gold_labels, predicted, predicted_binary;
    std::vector<std::vector<evalkit::SubEventSpan>> gold_spans;
    for (const auto &s : examples) {
      gold_labels.push_back(s.gold_labels);
      gold_spans.push_back(s.spans);
      predicted.push_back(labeler::PredictBio(model, s));
      predicted_binary.push_back(evalkit::BioToBinary(predicted.back()));
    }
    auto eval = [&](Protocol p, Aggregation a) {
      switch (p) {
        case Protocol::kBinLevel: return evalkit::EvalBinLevel(gold_labels, predicted, a);
        case Protocol::kRelaxed: return evalkit::EvalRelaxed(gold_spans, predicted, model.scheme, a);
        case Protocol::kBinaryEvent: return evalkit::EvalBinaryEvent(gold_spans, predicted_binary, a);
      }
      throw ConfigError("unhandled protocol");
    };
    const std::vector<Protocol> protocols =
        options.all ? std::vector<Protocol>{Protocol::kBinLevel, Protocol::kRelaxed, Protocol::kBinaryEvent}
                    : std::vector<Protocol>{options.protocol.empty()
                                                ? Protocol::kBinLevel
                                                : evalkit::ParseProtocol(options.protocol)};
    out << Reports(protocols, aggs, eval, options.all).dump(2) << '\n';
    return kExitOk;
  });
}

int CmdPredict(const PredictOptions &options, std::ostream &out, std::ostream &err) {
  return Guard(err, [&] {
    Resolve(options.common);
    if (options.model_dir.empty()) throw ConfigError("predict needs --model");
    labeler::Model model = labeler::LoadModel(options.model_dir);
    const auto raw = LoadDir(options.data_dir, "data");
    std::size_t total_discarded = 0;

    ordered_json streams = ordered_json::array();
    for (const auto &r : raw) {
      // Gold annotations are not needed; an unknown type must not block
      // prediction.
      ingest::RawStream unlabeled = r;
      unlabeled.annotation.spans.clear();
      std::size_t discarded = 0;
      const auto example = ingest::BuildExample(unlabeled, model.vocab, model.scheme, &discarded);
      total_discarded += discarded;

      ordered_json entry;
      entry["stream_id"] = example.stream_id;
      ordered_json labels = ordered_json::array();
      ordered_json spans = ordered_json::array();
      if (model.config.head == labeler::Head::kBio) {
        const auto predicted = labeler::PredictBio(model, example);
        for (int id : predicted) labels.push_back(model.scheme.LabelName(id));
        for (const auto &s : evalkit::BioToSpans(predicted, model.scheme)) {
          spans.push_back({{"type", s.type}, {"first_bin", s.first_bin}, {"last_bin", s.last_bin}});
        }
      } else {
        const auto predicted = labeler::PredictBinary(model, example);
        for (int id : predicted) labels.push_back(id == labeler::kEvent ? "event" : "no-event");
        for (const auto &[first, last] : evalkit::PositiveRuns(predicted)) {
          spans.push_back({{"type", "event"}, {"first_bin", first}, {"last_bin", last}});
        }
      }
      entry["labels"] = labels;
      entry["spans"] = spans;
      streams.push_back(entry);
    }
    ReportDiscarded(err, total_discarded);
    out << streams.dump(2) << '\n';
    return kExitOk;
  });
}

int CmdGradCheck(const GradCheckOptions &options, std::ostream &out, std::ostream &err) {
  return Guard(err, [&] {
    const RunConfig config = Resolve(options.common);
    if (options.variant != "all") encoders::ParseVariant(options.variant);
    const auto cases = GradCheckMatrix(config.model, options.variant);

    ad::GradCheckOptions check;
    bool all_passed = true;
    ordered_json results = ordered_json::array();
    for (const auto &c : cases) {
      const ad::GradCheckReport report = CheckModelGradients(c.config, options.inject_fault, check);
      all_passed = all_passed && report.passed;
      fmt::print(err, "{:<36} max rel err {:.3e}  {}\n", c.name, report.max_rel_error,
                 report.passed ? "ok" : "FAILED");
      ordered_json r;
      r["case"] = c.name;
      r["passed"] = report.passed;
      r["max_rel_error"] = report.max_rel_error;
      r["checked"] = report.checked;
      r["worst_param"] = report.worst_param;
      r["worst_index"] = report.worst_index;
      r["worst_analytic"] = report.worst_analytic;
      r["worst_numeric"] = report.worst_numeric;
      results.push_back(r);
    }
    ordered_json summary;
    summary["tolerance"] = check.tolerance;
    summary["passed"] = all_passed;
    summary["cases"] = results;
    out << summary.dump(2) << '\n';
    return all_passed ? kExitOk : kExitVerificationFailed;
  });
}

}  // namespace subevent::cli
