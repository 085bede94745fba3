#include "subevent/cli/gradcheck.h"

#include <fmt/format.h>

#include "subevent/encoders/tfidf.h"

namespace subevent::cli {
namespace {

using ad::Graph;
using ad::Tensor;
using ad::Var;
using encoders::EncoderVariant;
using evalkit::LabelScheme;

// 0.1 * x forward, but +0.1 * dy is subtracted in backward.
Var WrongSignScale(Var x) {
  constexpr double kFactor = 0.1;
  Graph &graph = x.graph();
  std::vector<double> values(x.value().values().begin(), x.value().values().end());
  for (double &v : values) v *= kFactor;
  const Var inputs[] = {x};
  return graph.Record(Tensor(x.shape(), std::move(values)), inputs,
                      [x](Graph &g, std::span<const double> dy) {
                        auto dx = g.grad(x);
                        for (std::size_t i = 0; i < dx.size(); ++i) dx[i] -= kFactor * dy[i];
                      });
}

ingest::StreamExample ToyStream(const LabelScheme &scheme) {
  auto tweet = [](std::vector<int> ids) { return ingest::TokenizedTweet{std::move(ids)}; };
  ingest::StreamExample s;
  s.stream_id = "toy";
  s.bins.resize(3);
  s.bins[0].tweets = {tweet({4, 5, 6}), tweet({7, 4})};
  s.bins[1].tweets = {tweet({8}), tweet({9, 5, 4, 6}), tweet({6, 6})};
  s.bins[2].tweets = {tweet({2, 3, 7})};
  for (std::size_t i = 0; i < 3; ++i) s.bins[i].index = i;
  s.spans = {{"goal", 0, 1}};
  s.gold_labels = evalkit::SpansToBio(3, s.spans, scheme);
  return s;
}

}  // namespace

std::vector<GradCheckCase> GradCheckMatrix(const labeler::ModelConfig &base, const std::string &variant) {
  labeler::ModelConfig small = base;
  small.encoder.d_embed = 4;
  small.encoder.d_tweet_lstm = 4;
  small.encoder.d_bin = 4;
  small.encoder.cnn_window = 3;
  small.encoder.two_level_attention = false;
  small.d_chrono = 5;
  small.head = labeler::Head::kBio;

  std::vector<GradCheckCase> cases;
  for (EncoderVariant v : encoders::kAllVariants) {
    if (variant != "all" && encoders::ToString(v) != variant) continue;
    std::vector<bool> tl_options = {false};
    if (encoders::IsTweetLevel(v)) tl_options.push_back(true);
    for (bool chrono : {true, false}) {
      for (bool tl : tl_options) {
        GradCheckCase c{fmt::format("{}{}/{}", encoders::ToString(v), tl ? "+tl" : "",
                                    chrono ? "chrono" : "independent"),
                        small};
        c.config.encoder.variant = v;
        c.config.encoder.tweet_lstm = tl;
        c.config.chronological = chrono;
        cases.push_back(std::move(c));
      }
    }
    if (v == EncoderVariant::kWordAttention) {
      GradCheckCase c{"word-attention+two-level/chrono", small};
      c.config.encoder.variant = v;
      c.config.encoder.two_level_attention = true;
      cases.push_back(std::move(c));
    }
    if (v == EncoderVariant::kWordAvg) {
      GradCheckCase c{"word-avg/binary", small};
      c.config.encoder.variant = v;
      c.config.chronological = false;
      c.config.head = labeler::Head::kBinary;
      cases.push_back(std::move(c));
    }
  }
  return cases;
}

ad::GradCheckReport CheckModelGradients(const labeler::ModelConfig &config, bool inject_fault,
                                        const ad::GradCheckOptions &options) {
  const LabelScheme scheme({"card", "goal"});
  const ingest::Vocab vocab =
      ingest::Vocab::FromTokens({"<pad>", "<unk>", "<url>", "<user>", "a", "b", "c", "d", "e", "f"});
  const ingest::StreamExample stream = ToyStream(scheme);
  const std::vector<ingest::StreamExample> corpus = {stream};
  const encoders::TfIdfStats tfidf = encoders::FitTfIdf(corpus, vocab.size());

  labeler::Model model = labeler::InitModel(config, scheme, vocab, &tfidf);
  // Larger weights than the initializer uses, so every path carries a
  // gradient well above the comparison floor.
  ad::Rng rng = ad::Rng(config.seed).Split("gradcheck");
  for (auto &[name, tensor] : model.params) {
    if (!tensor.requires_grad()) continue;
    for (double &v : tensor.values()) v = rng.Uniform(-0.5, 0.5);
  }

  const std::vector<int> targets = labeler::Targets(config, stream);
  const ad::Rng dropout_seed = ad::Rng(config.seed).Split("dropout");
  auto loss_fn = [&](Graph &graph) {
    ad::Rng dropout = dropout_seed;
    Var logits = labeler::Forward(model, graph, stream, ad::Mode::kTrain, dropout);
    Var loss = ad::SoftmaxCrossEntropy(logits, targets);
    if (inject_fault) loss = ad::Add(loss, WrongSignScale(ad::Sum(logits)));
    return loss;
  };
  return ad::GradientCheck(loss_fn, model.params, options);
}

}  // namespace subevent::cli
