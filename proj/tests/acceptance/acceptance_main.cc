// Acceptance gate. Each criterion prints one PASS/FAIL line; the exit code is
// nonzero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>
#include <json.hpp>

#include "eval_reference.h"
#include "subevent/evalkit/bio.h"
#include "subevent/evalkit/burst.h"
#include "subevent/evalkit/metrics.h"
#include "subevent/ingest/stream.h"
#include "subevent/labeler/model.h"
#include "subevent/labeler/trainer.h"
#include "subevent/synth/generator.h"

namespace subevent {
namespace {

namespace fs = std::filesystem;
using evalkit::Aggregation;
using evalkit::LabelScheme;
using evalkit::SubEventSpan;
using Clock = std::chrono::steady_clock;
using Labels = std::vector<int>;
using Spans = std::vector<SubEventSpan>;

struct Verdict {
  bool passed = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string ReadFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const fs::path &Scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "subevent_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the CLI with stdout captured; stderr goes to a log file.
int RunCli(const std::string &args, std::string *out) {
  const fs::path out_file = Scratch() / "stdout.txt", err_file = Scratch() / "stderr.txt";
  const std::string cmd =
      std::string(SUBEVENT_CLI) + " " + args + " >" + out_file.string() + " 2>" + err_file.string();
  const int status = std::system(cmd.c_str());
  if (out) *out = ReadFile(out_file);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict GradientCheck() {
  const auto start = Clock::now();
  std::string out;
  const int code = RunCli("gradcheck --variant all", &out);
  const double secs = Seconds(start);
  const nlohmann::json report = nlohmann::json::parse(out, nullptr, false);
  if (report.is_discarded()) return {false, fmt::format("exit {}, unparsable report", code)};
  double worst = 0.0;
  for (const auto &c : report["cases"]) worst = std::max(worst, c["max_rel_error"].get<double>());
  const std::size_t cases = report["cases"].size();
  const bool ok = code == 0 && report["passed"].get<bool>() && worst < 1e-4 && cases >= 20 && secs < 120;
  return {ok, fmt::format("{} cases, max rel err {:.2e}, {:.1f} s", cases, worst, secs)};
}

Verdict MetricOracles() {
  using namespace subevent::testing;
  const auto start = Clock::now();
  std::mt19937_64 gen(20240);
  const LabelScheme scheme({"a", "b", "c"});
  long mismatches = 0;
  constexpr int kTrials = 10'000;
  auto same = [](const evalkit::EvalReport &r, const Ref &ref) {
    return r.precision == ref.p && r.recall == ref.r && r.f1 == ref.f;
  };
  for (int trial = 0; trial < kTrials; ++trial) {
    const std::size_t streams = 1 + gen() % 4;
    std::vector<Spans> gold_spans;
    std::vector<Labels> gold, pred, binary;
    for (std::size_t s = 0; s < streams; ++s) {
      const std::size_t n = gen() % 20;
      gold_spans.push_back(RandomSpans(gen, n, scheme));
      gold.push_back(evalkit::SpansToBio(n, gold_spans.back(), scheme));
      Labels p(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        p[i] = gen() % 2 ? gold.back()[i] : static_cast<int>(gen() % scheme.num_labels());
        b[i] = static_cast<int>(gen() % 2);
      }
      pred.push_back(std::move(p));
      binary.push_back(std::move(b));
    }
    for (Aggregation agg : {Aggregation::kMicro, Aggregation::kMacro}) {
      std::vector<std::array<long, 4>> bl, rx, be;
      for (std::size_t s = 0; s < streams; ++s) {
        bl.push_back(RefBinLevelCounts(gold[s], pred[s]));
        rx.push_back(RefRelaxedCounts(gold_spans[s], pred[s], scheme));
        be.push_back(RefBinaryCounts(gold_spans[s], binary[s]));
      }
      mismatches += !same(evalkit::EvalBinLevel(gold, pred, agg), RefAggregate(bl, agg));
      mismatches += !same(evalkit::EvalRelaxed(gold_spans, pred, scheme, agg), RefAggregate(rx, agg));
      mismatches += !same(evalkit::EvalBinaryEvent(gold_spans, binary, agg), RefAggregate(be, agg));
    }
  }
  const double secs = Seconds(start);
  return {mismatches == 0 && secs < 30,
          fmt::format("{} pairs x 3 protocols x 2 aggregations, {} mismatches, {:.1f} s", kTrials, mismatches,
                      secs)};
}

Verdict BioCodec() {
  const auto start = Clock::now();
  std::mt19937_64 gen(31);
  const LabelScheme scheme({"a", "b", "c"});
  long failures = 0;
  constexpr int kTrials = 10'000;
  for (int trial = 0; trial < kTrials; ++trial) {
    const std::size_t n = gen() % 40;
    const Spans spans = testing::RandomSpans(gen, n, scheme);
    failures += evalkit::BioToSpans(evalkit::SpansToBio(n, spans, scheme), scheme) != spans;
  }
  // Repairs, with card = 0 and goal = 1: orphan I opens a span, B always
  // opens a new span, I of another type switches span.
  const LabelScheme cg({"card", "goal"});
  constexpr int O = 0, Ic = 2, Bg = 3, Ig = 4;
  failures += evalkit::BioToSpans(Labels{Ig, Ig, O}, cg) != Spans{{"goal", 0, 1}};
  failures += evalkit::BioToSpans(Labels{Bg, Bg}, cg) != Spans{{"goal", 0, 0}, {"goal", 1, 1}};
  failures += evalkit::BioToSpans(Labels{Bg, Ic, Ic, O, Ig}, cg) !=
              Spans{{"goal", 0, 0}, {"card", 1, 2}, {"goal", 4, 4}};
  const double secs = Seconds(start);
  return {failures == 0 && secs < 10,
          fmt::format("{} round trips + 3 repairs, {} failures, {:.1f} s", kTrials, failures, secs)};
}

Verdict Overfit() {
  const auto start = Clock::now();
  synth::SynthConfig synth;
  synth.n_streams = 1;
  const auto raw = synth::Generate(synth);
  labeler::ModelConfig config;
  config.encoder.variant = encoders::EncoderVariant::kTweetAvg;
  config.chronological = true;
  config.dropout = 0.0;
  config.epochs = 200;
  config.patience = 200;
  config.vocab_min_count = 1;
  labeler::PreparedData data = labeler::Prepare(config, raw, {});
  labeler::TrainResult result = labeler::Train(std::move(data.initial), data.train, {});
  std::vector<Labels> gold, pred;
  for (const auto &s : data.train) {
    gold.push_back(s.gold_labels);
    pred.push_back(labeler::PredictBio(result.model, s));
  }
  const double f1 = evalkit::EvalBinLevel(gold, pred, Aggregation::kMicro).f1;
  const double secs = Seconds(start);
  return {f1 >= 0.99 && result.curve.size() <= 200 && secs < 300,
          fmt::format("training bin-level F1 {:.4f} (best epoch {}), {:.1f} s", f1, result.best_epoch, secs)};
}

// Default synthetic dataset with a 3 / 7 / 10 split, as the CLI writes it.
struct Split {
  std::vector<ingest::RawStream> train, dev, test;
};

Split DefaultSplit(std::uint64_t seed) {
  synth::SynthConfig synth;
  synth.seed = seed;
  auto all = synth::Generate(synth);
  Split s;
  s.train.assign(all.begin(), all.begin() + 3);
  s.dev.assign(all.begin() + 3, all.begin() + 10);
  s.test.assign(all.begin() + 10, all.end());
  return s;
}

labeler::ModelConfig ComparisonConfig(std::uint64_t seed) {
  labeler::ModelConfig c;
  c.seed = seed;
  c.epochs = 300;
  c.patience = 40;
  c.d_chrono = 64;
  c.dropout = 0.5;
  return c;
}

labeler::Model TrainOn(const labeler::ModelConfig &config, const Split &split) {
  labeler::PreparedData data = labeler::Prepare(config, split.train, split.dev);
  return labeler::Train(std::move(data.initial), data.train, data.dev).model;
}

std::vector<ingest::StreamExample> TestExamples(const labeler::Model &model, const Split &split) {
  std::vector<ingest::StreamExample> out;
  for (const auto &r : split.test) out.push_back(ingest::BuildExample(r, model.vocab, model.scheme));
  return out;
}

double TestBinLevel(labeler::Model model, const Split &split) {
  std::vector<Labels> gold, pred;
  for (const auto &s : TestExamples(model, split)) {
    gold.push_back(s.gold_labels);
    pred.push_back(labeler::PredictBio(model, s));
  }
  return evalkit::EvalBinLevel(gold, pred, Aggregation::kMicro).f1;
}

Verdict ChronologicalBenefit() {
  const auto start = Clock::now();
  int wins = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Split split = DefaultSplit(seed);
    labeler::ModelConfig chrono = ComparisonConfig(seed);
    labeler::ModelConfig flat = chrono;
    flat.chronological = false;
    const double with = TestBinLevel(TrainOn(chrono, split), split);
    const double without = TestBinLevel(TrainOn(flat, split), split);
    wins += with - without >= 0.01;
    detail += fmt::format("s{} {:.3f}/{:.3f} ", seed, with, without);
  }
  const double secs = Seconds(start);
  return {wins >= 4 && secs < 1800, fmt::format("{}wins {}/5, {:.1f} s", detail, wins, secs)};
}

Verdict RelaxedFlaw() {
  const LabelScheme cg({"card", "goal"});
  constexpr int Bc = 1, Ic = 2, Bg = 3;
  const std::vector<Spans> gold_spans = {{{"goal", 0, 3}}};
  const std::vector<Labels> gold = {evalkit::SpansToBio(4, gold_spans[0], cg)};
  const std::vector<Labels> pred = {{Bg, Bc, Ic, Ic}};
  const double relaxed = evalkit::EvalRelaxed(gold_spans, pred, cg, Aggregation::kMicro).f1;
  const double bin = evalkit::EvalBinLevel(gold, pred, Aggregation::kMicro).f1;
  return {relaxed == 1.0 && bin == 0.25, fmt::format("relaxed {}, bin-level {}", relaxed, bin)};
}

Verdict BinaryBeatsBurst() {
  const auto start = Clock::now();
  int wins = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Split split = DefaultSplit(seed);
    labeler::ModelConfig config = ComparisonConfig(seed);
    config.chronological = false;
    config.head = labeler::Head::kBinary;
    config.encoder.variant = encoders::EncoderVariant::kWordAvg;
    labeler::Model model = TrainOn(config, split);
    std::vector<Spans> gold;
    std::vector<Labels> binary, burst;
    for (const auto &s : TestExamples(model, split)) {
      gold.push_back(s.spans);
      binary.push_back(labeler::PredictBinary(model, s));
      burst.push_back(evalkit::BurstBaseline(s.TweetCounts(), evalkit::BurstConfig{}));
    }
    const double b = evalkit::EvalBinaryEvent(gold, binary, Aggregation::kMicro).f1;
    const double r = evalkit::EvalBinaryEvent(gold, burst, Aggregation::kMicro).f1;
    wins += b - r >= 0.05;
    detail += fmt::format("s{} {:.3f}/{:.3f} ", seed, b, r);
  }
  const double secs = Seconds(start);
  return {wins >= 3 && secs < 900, fmt::format("{}wins {}/5, {:.1f} s", detail, wins, secs)};
}

Verdict Determinism() {
  const fs::path data = Scratch() / "data";
  if (RunCli("generate --out " + data.string(), nullptr) != 0) return {false, "generate failed"};
  const std::string train = "train --set epochs=15 --set dropout=0.3 --train " + (data / "train").string() +
                            " --dev " + (data / "dev").string() + " --out ";
  const fs::path a = Scratch() / "run_a", b = Scratch() / "run_b";
  if (RunCli(train + a.string(), nullptr) != 0 || RunCli(train + b.string(), nullptr) != 0) {
    return {false, "train failed"};
  }
  const std::string model_a = ReadFile(a / "model.slb"), curve_a = ReadFile(a / "learning_curve.csv");
  const bool same = !model_a.empty() && !curve_a.empty() && model_a == ReadFile(b / "model.slb") &&
                    curve_a == ReadFile(b / "learning_curve.csv");
  return {same, fmt::format("checkpoint {} bytes, curve {} bytes, {}", model_a.size(), curve_a.size(),
                            same ? "identical" : "differ")};
}

}  // namespace
}  // namespace subevent

int main() {
  using namespace subevent;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"AC1 gradient check", GradientCheck},        {"AC2 metric oracles", MetricOracles},
      {"AC3 BIO codec", BioCodec},                  {"AC4 overfit single stream", Overfit},
      {"AC5 chronological benefit", ChronologicalBenefit}, {"AC6 relaxed flaw fixture", RelaxedFlaw},
      {"AC7 binary beats burst", BinaryBeatsBurst}, {"AC8 training determinism", Determinism},
  };
  int failed = 0;
  for (const auto &[name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception &e) {
      v = {false, fmt::format("threw: {}", e.what())};
    }
    failed += !v.passed;
    fmt::print("[{}] {}: {}\n", v.passed ? "PASS" : "FAIL", name, v.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
