#include "subevent/labeler/model.h"

#include <fmt/format.h>

#include "subevent/autodiff/lstm.h"
#include "subevent/errors.h"

namespace subevent::labeler {
namespace {

using ad::Graph;
using ad::Tensor;
using ad::Var;

Tensor &Require(ad::ParameterSet &params, const std::string &name) {
  auto it = params.find(name);
  if (it == params.end()) throw ConfigError(fmt::format("missing parameter tensor '{}'", name));
  return it->second;
}

void Put(ad::ParameterSet &params, const std::string &name, Tensor t) {
  t.set_requires_grad(true);
  params.insert_or_assign(name, std::move(t));
}

void CheckShapes(const Model &model) {
  const std::size_t vocab = model.vocab.size();
  if (auto it = model.params.find("embed"); it != model.params.end()) {
    if (it->second.rank() != 2 || it->second.dim(0) != vocab ||
        it->second.dim(1) != model.config.encoder.d_embed) {
      throw ConfigError(fmt::format("embedding table {} does not match vocabulary of {} x d_embed {}",
                                    ad::ShapeToString(it->second.shape()), vocab,
                                    model.config.encoder.d_embed));
    }
  }
}

}  // namespace

std::string ToString(Head head) { return head == Head::kBio ? "bio" : "binary"; }

Head ParseHead(std::string_view name) {
  if (name == "bio") return Head::kBio;
  if (name == "binary") return Head::kBinary;
  throw ConfigError(fmt::format("unknown head '{}'", name));
}

void ModelConfig::Validate() const {
  encoder.Validate();
  if (d_chrono == 0) throw ConfigError("d_chrono must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError(fmt::format("dropout must be in [0, 1), got {}", dropout));
  }
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (patience < 0) throw ConfigError("patience must be >= 0");
  if (!(adam.lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (vocab_min_count < 1) throw ConfigError("vocab_min_count must be >= 1");
  if (head == Head::kBinary && chronological) {
    throw ConfigError("the binary head classifies bins independently; set chronological to false");
  }
}

std::size_t ModelConfig::NumClasses(const LabelScheme &scheme) const {
  return head == Head::kBinary ? 2 : scheme.num_labels();
}

Model InitModel(const ModelConfig &config, LabelScheme scheme, ingest::Vocab vocab,
                const encoders::TfIdfStats *tfidf) {
  config.Validate();
  Model model{config, std::move(scheme), std::move(vocab), {}};
  ad::Rng rng = ad::Rng(config.seed).Split("init");
  encoders::InitEncoderParams(config.encoder, model.vocab.size(), tfidf, rng, model.params);

  const std::size_t d_bin = config.encoder.d_bin;
  const std::size_t h = config.d_chrono;
  const std::size_t classes = config.NumClasses(model.scheme);
  if (config.chronological) {
    encoders::InitLstmParams("chrono", d_bin, h, rng, model.params);
    ad::Rng r = rng.Split("out");
    Put(model.params, "out.W", encoders::GlorotUniform({h, classes}, h, classes, r));
    Put(model.params, "out.b", Tensor::Zeros({classes}));
  } else {
    ad::Rng r = rng.Split("mlp");
    Put(model.params, "mlp.W1", encoders::GlorotUniform({d_bin, h}, d_bin, h, r));
    Put(model.params, "mlp.b1", Tensor::Zeros({h}));
    Put(model.params, "mlp.W2", encoders::GlorotUniform({h, classes}, h, classes, r));
    Put(model.params, "mlp.b2", Tensor::Zeros({classes}));
  }
  return model;
}

Var Forward(Model &model, Graph &graph, const ingest::StreamExample &stream, ad::Mode mode,
            ad::Rng &dropout_rng) {
  const ModelConfig &config = model.config;
  if (stream.bins.empty()) throw std::invalid_argument("stream has no bins");
  CheckShapes(model);

  encoders::EncoderVars vars = encoders::BindEncoder(config.encoder, graph, model.params);
  std::vector<Var> bin_vectors;
  bin_vectors.reserve(stream.bins.size());
  for (const auto &bin : stream.bins) {
    bin_vectors.push_back(encoders::EncodeBin(config.encoder, vars, graph, bin));
  }
  Var x = ad::Dropout(ad::Stack(bin_vectors), config.dropout, mode, dropout_rng);

  if (config.chronological) {
    ad::LstmWeights lstm = encoders::BindLstm("chrono", graph, model.params);
    Var hidden = ad::Dropout(ad::LstmSequence(x, lstm), config.dropout, mode, dropout_rng);
    return ad::AddBias(ad::MatMul(hidden, graph.Parameter(Require(model.params, "out.W"))),
                       graph.Parameter(Require(model.params, "out.b")));
  }
  Var hidden = ad::Relu(ad::AddBias(ad::MatMul(x, graph.Parameter(Require(model.params, "mlp.W1"))),
                                    graph.Parameter(Require(model.params, "mlp.b1"))));
  return ad::AddBias(ad::MatMul(hidden, graph.Parameter(Require(model.params, "mlp.W2"))),
                     graph.Parameter(Require(model.params, "mlp.b2")));
}

Tensor ComputeLogits(Model &model, const ingest::StreamExample &stream) {
  Graph graph(/*record_gradients=*/false);
  ad::Rng unused(0);
  Tensor logits = Forward(model, graph, stream, ad::Mode::kEval, unused).value();
  return logits;
}

std::vector<int> ArgmaxRows(const Tensor &logits) {
  const std::size_t n = logits.dim(0);
  const std::size_t classes = logits.dim(1);
  std::vector<int> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 1; c < classes; ++c) {
      if (logits.at(i, c) > logits.at(i, static_cast<std::size_t>(out[i]))) out[i] = static_cast<int>(c);
    }
  }
  return out;
}

std::vector<int> PredictBio(Model &model, const ingest::StreamExample &stream) {
  if (model.config.head != Head::kBio) throw ConfigError("PredictBio needs a bio head");
  return ArgmaxRows(ComputeLogits(model, stream));
}

std::vector<int> PredictBinary(Model &model, const ingest::StreamExample &stream) {
  if (model.config.head != Head::kBinary) throw ConfigError("PredictBinary needs a binary head");
  return ArgmaxRows(ComputeLogits(model, stream));
}

std::vector<int> Targets(const ModelConfig &config, const ingest::StreamExample &stream) {
  if (config.head == Head::kBio) return stream.gold_labels;
  std::vector<int> out(stream.gold_labels.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = stream.gold_labels[i] == LabelScheme::kOutside ? kNoEvent : kEvent;
  }
  return out;
}

}  // namespace subevent::labeler
