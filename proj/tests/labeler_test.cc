#include <cmath>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "subevent/errors.h"
#include "subevent/labeler/model.h"
#include "subevent/labeler/model_io.h"
#include "subevent/labeler/trainer.h"
#include "subevent/synth/generator.h"

namespace subevent::labeler {
namespace {

using ad::Tensor;
using encoders::EncoderVariant;
using ingest::RawStream;
using ingest::StreamExample;

synth::SynthConfig TinySynth(std::size_t streams, std::uint64_t seed = 3) {
  synth::SynthConfig s;
  s.n_streams = streams;
  s.n_bins = 14;
  s.spans_per_stream = 3;
  s.base_rate = 3;
  s.burst_rate = 12;
  s.noise_vocab = 40;
  // One type, so every split shares the label scheme.
  s.types = {{"goal", 2.0, 1.0}};
  s.seed = seed;
  return s;
}

ModelConfig SmallConfig(EncoderVariant variant = EncoderVariant::kTweetAvg, bool chronological = true) {
  ModelConfig c;
  c.encoder.variant = variant;
  c.encoder.d_embed = c.encoder.d_bin = c.encoder.d_tweet_lstm = 6;
  c.d_chrono = 8;
  c.chronological = chronological;
  c.dropout = 0.0;
  c.vocab_min_count = 1;
  c.epochs = 5;
  c.patience = 5;
  return c;
}

PreparedData PrepareTiny(const ModelConfig &config, std::size_t n_train = 2, std::size_t n_dev = 1) {
  const auto raw = synth::Generate(TinySynth(n_train + n_dev));
  const std::vector<RawStream> train(raw.begin(), raw.begin() + static_cast<long>(n_train));
  const std::vector<RawStream> dev(raw.begin() + static_cast<long>(n_train), raw.end());
  return Prepare(config, train, dev);
}

std::vector<double> Row(const Tensor &t, std::size_t r) {
  std::vector<double> out(t.dim(1));
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = t.at(r, c);
  return out;
}

TEST(Argmax, BinaryClassOrderAndTies) {
  EXPECT_EQ(ArgmaxRows(Tensor::Matrix({{2.0, -1.0}})), std::vector<int>{kNoEvent});
  EXPECT_EQ(ArgmaxRows(Tensor::Matrix({{0.5, 0.5}})), std::vector<int>{kNoEvent});
  EXPECT_EQ(ArgmaxRows(Tensor::Matrix({{0.1, 0.4}})), std::vector<int>{kEvent});
}

TEST(Argmax, KeepsIllegalSequences) {
  // I-goal directly after O is returned as is; repair happens at decoding.
  const Tensor logits = Tensor::Matrix({{0, 0, 9}, {9, 0, 0}, {0, 0, 0}});
  EXPECT_EQ(ArgmaxRows(logits), (std::vector<int>{2, 0, 0}));
}

TEST(Forward, IndependentHeadIsRowEquivariant) {
  PreparedData data = PrepareTiny(SmallConfig(EncoderVariant::kTweetAvg, false));
  Model &model = data.initial;
  StreamExample stream = data.train[0];
  const Tensor before = ComputeLogits(model, stream);
  std::reverse(stream.bins.begin(), stream.bins.end());
  const Tensor after = ComputeLogits(model, stream);
  const std::size_t n = before.dim(0);
  for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(Row(after, i), Row(before, n - 1 - i));
}

TEST(Forward, ChronologicalCarriesEarlierBins) {
  int influenced = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ModelConfig config = SmallConfig();
    config.seed = seed;
    PreparedData data = PrepareTiny(config);
    StreamExample stream = data.train[0];
    const Tensor before = ComputeLogits(data.initial, stream);
    stream.bins[0].tweets.push_back({{4, 5, 6, 7}});
    const Tensor after = ComputeLogits(data.initial, stream);
    double max_later = 0.0;
    for (std::size_t i = 1; i < before.dim(0); ++i) {
      for (std::size_t c = 0; c < before.dim(1); ++c) {
        max_later = std::max(max_later, std::abs(after.at(i, c) - before.at(i, c)));
      }
    }
    influenced += max_later > 1e-9;
  }
  EXPECT_EQ(influenced, 5);
}

TEST(Forward, ZeroClassifierGivesUniformScores) {
  for (bool chrono : {true, false}) {
    PreparedData data = PrepareTiny(SmallConfig(EncoderVariant::kTweetAvg, chrono));
    Model &model = data.initial;
    for (const char *name : {"out.W", "out.b", "mlp.W2", "mlp.b2"}) {
      if (model.params.count(name)) model.params.at(name).Fill(0.0);
    }
    const Tensor logits = ComputeLogits(model, data.train[0]);
    for (double v : logits.values()) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(PredictBio(model, data.train[0]), std::vector<int>(data.train[0].bins.size(), 0));
  }
}

TEST(Forward, SingleBinStream) {
  PreparedData data = PrepareTiny(SmallConfig());
  StreamExample one = data.train[0];
  one.bins.resize(1);
  one.gold_labels.resize(1);
  EXPECT_EQ(PredictBio(data.initial, one).size(), 1u);
}

TEST(Forward, DegenerateRecurrenceIsPerBin) {
  // Zero recurrent weights and a closed forget gate remove both paths from
  // bin t-1 to bin t; later rows then ignore earlier bins.
  PreparedData data = PrepareTiny(SmallConfig());
  Model &model = data.initial;
  const std::size_t h = model.config.d_chrono;
  model.params.at("chrono.U").Fill(0.0);
  Tensor &w = model.params.at("chrono.W");
  for (std::size_t r = 0; r < w.dim(0); ++r) {
    for (std::size_t c = h; c < 2 * h; ++c) w.at(r, c) = 0.0;
  }
  Tensor &b = model.params.at("chrono.b");
  for (std::size_t c = h; c < 2 * h; ++c) b[c] = -60.0;

  StreamExample stream = data.train[0];
  const Tensor before = ComputeLogits(model, stream);
  stream.bins[0].tweets.push_back({{4, 5, 6, 7}});
  const Tensor after = ComputeLogits(model, stream);
  for (std::size_t i = 1; i < before.dim(0); ++i) {
    for (std::size_t c = 0; c < before.dim(1); ++c) EXPECT_NEAR(after.at(i, c), before.at(i, c), 1e-12);
  }
}

TEST(Predict, HeadMismatchIsAnError) {
  PreparedData data = PrepareTiny(SmallConfig());
  EXPECT_THROW(PredictBinary(data.initial, data.train[0]), ConfigError);
  ModelConfig binary = SmallConfig(EncoderVariant::kWordAvg, false);
  binary.head = Head::kBinary;
  PreparedData b = PrepareTiny(binary);
  EXPECT_THROW(PredictBio(b.initial, b.train[0]), ConfigError);
  EXPECT_EQ(ComputeLogits(b.initial, b.train[0]).dim(1), 2u);
}

TEST(Config, Validation) {
  ModelConfig c = SmallConfig();
  c.head = Head::kBinary;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = SmallConfig();
  c.dropout = 1.0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = SmallConfig();
  c.patience = -1;
  EXPECT_THROW(c.Validate(), ConfigError);
  EXPECT_THROW(ParseHead("crf"), ConfigError);
}

TEST(Targets, BinaryCollapsesTypes) {
  ModelConfig c = SmallConfig(EncoderVariant::kWordAvg, false);
  c.head = Head::kBinary;
  StreamExample s;
  s.gold_labels = {0, 1, 2, 0, 3};
  EXPECT_EQ(Targets(c, s), (std::vector<int>{0, 1, 1, 0, 1}));
}

TEST(Prepare, DevTypeOutsideTrainingSchemeIsNamed) {
  auto raw = synth::Generate(TinySynth(2));
  raw[1].annotation.spans = {{"penalty", 0, 0}};
  const std::vector<RawStream> train = {raw[0]}, dev = {raw[1]};
  try {
    Prepare(SmallConfig(), train, dev);
    FAIL();
  } catch (const AnnotationError &e) {
    EXPECT_NE(std::string(e.what()).find("penalty"), std::string::npos) << e.what();
  }
}

TEST(Prepare, VocabularyComesFromTrainingOnly) {
  auto raw = synth::Generate(TinySynth(2));
  raw[1].tweets.push_back({"extra", raw[1].annotation.start, "zzzunique zzzunique"});
  const std::vector<RawStream> train = {raw[0]}, dev = {raw[1]};
  const PreparedData data = Prepare(SmallConfig(), train, dev);
  EXPECT_EQ(data.initial.vocab.Lookup("zzzunique"), ingest::Vocab::kUnk);
}

TEST(Checkpoint, RoundTripGivesIdenticalLogits) {
  for (EncoderVariant v : {EncoderVariant::kTweetAvg, EncoderVariant::kWordTfIdf}) {
    ModelConfig config = SmallConfig(v);
    config.encoder.d_bin = v == EncoderVariant::kWordTfIdf ? 5 : 6;
    PreparedData data = PrepareTiny(config);
    const auto dir = std::filesystem::temp_directory_path() / "subevent_labeler_ckpt";
    std::filesystem::remove_all(dir);
    SaveModel(dir, data.initial);
    Model loaded = LoadModel(dir);
    EXPECT_EQ(loaded.scheme, data.initial.scheme);
    EXPECT_EQ(loaded.vocab.tokens(), data.initial.vocab.tokens());
    for (const auto &stream : data.dev) {
      const Tensor a = ComputeLogits(data.initial, stream), b = ComputeLogits(loaded, stream);
      ASSERT_EQ(a.shape(), b.shape());
      for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(std::bit_cast<std::uint64_t>(a[i]), std::bit_cast<std::uint64_t>(b[i]));
      }
    }
    std::filesystem::remove_all(dir);
  }
}

TEST(Checkpoint, SidecarMismatchIsRejected) {
  PreparedData data = PrepareTiny(SmallConfig());
  const auto dir = std::filesystem::temp_directory_path() / "subevent_labeler_mismatch";
  std::filesystem::remove_all(dir);
  data.initial.params.at("out.b") = Tensor({7});
  SaveModel(dir, data.initial);
  EXPECT_THROW(LoadModel(dir), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST(ModelConfigJson, RoundTripAndUnknownKey) {
  ModelConfig c = SmallConfig(EncoderVariant::kTweetCnn);
  c.encoder.tweet_lstm = true;
  c.adam.lr = 0.003;
  const ModelConfig back = ModelConfigFromJson(ModelConfigToJson(c));
  EXPECT_EQ(ModelConfigToJson(back), ModelConfigToJson(c));
  EXPECT_THROW(ModelConfigFromJson(nlohmann::json{{"variant", "tweet-avg"}, {"colour", 1}}), ConfigError);
  EXPECT_THROW(ModelConfigFromJson(nlohmann::json{{"d_bin", -3}}), ConfigError);
}

TEST(Train, PatienceZeroRunsOneEpoch) {
  ModelConfig config = SmallConfig();
  config.patience = 0;
  config.epochs = 20;
  PreparedData data = PrepareTiny(config);
  const TrainResult r = Train(data.initial, data.train, data.dev);
  EXPECT_EQ(r.curve.size(), 1u);
  EXPECT_EQ(r.best_epoch, 1);
}

TEST(Train, DeterministicCurve) {
  ModelConfig config = SmallConfig(EncoderVariant::kTweetAttention);
  config.dropout = 0.3;
  PreparedData a = PrepareTiny(config), b = PrepareTiny(config);
  std::ostringstream csv_a, csv_b;
  const TrainResult ra = Train(a.initial, a.train, a.dev);
  const TrainResult rb = Train(b.initial, b.train, b.dev);
  WriteLearningCurve(csv_a, ra.curve);
  WriteLearningCurve(csv_b, rb.curve);
  EXPECT_EQ(csv_a.str(), csv_b.str());
  EXPECT_EQ(ra.model.params, rb.model.params);
  EXPECT_EQ(csv_a.str().substr(0, csv_a.str().find('\n')), "epoch,train_loss,dev_f1");
}

TEST(Train, OverfitsOneTinyStream) {
  ModelConfig config = SmallConfig();
  config.epochs = 200;
  config.patience = 200;
  PreparedData data = PrepareTiny(config, 1, 0);
  const TrainResult r = Train(data.initial, data.train, data.dev);
  ASSERT_FALSE(r.curve.empty());
  EXPECT_LT(r.curve.back().train_loss, 0.05);
  EXPECT_LT(r.curve.back().train_loss, r.curve.front().train_loss);
}

TEST(ClassWeights, InverseFrequency) {
  ModelConfig config = SmallConfig();
  config.class_weighting = true;
  StreamExample s;
  s.gold_labels = {0, 0, 0, 1, 2, 0};
  const StreamExample streams[] = {s};
  // 6 targets, 5 classes: O 4x, B 1x, I 1x, others absent.
  const auto w = ClassWeights(config, 5, streams);
  EXPECT_DOUBLE_EQ(w[0], 6.0 / (5 * 4));
  EXPECT_DOUBLE_EQ(w[1], 6.0 / 5);
  EXPECT_EQ(w[3], 0.0);
}

}  // namespace
}  // namespace subevent::labeler
