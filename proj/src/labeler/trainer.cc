#include "subevent/labeler/trainer.h"

#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "subevent/autodiff/adam.h"
#include "subevent/encoders/tfidf.h"
#include "subevent/errors.h"
#include "subevent/evalkit/metrics.h"

namespace subevent::labeler {

PreparedData Prepare(const ModelConfig &config, std::span<const ingest::RawStream> train,
                     std::span<const ingest::RawStream> dev) {
  config.Validate();
  if (train.empty()) throw ConfigError("training set is empty");
  ingest::Vocab vocab = ingest::BuildVocab(train, config.vocab_min_count);
  LabelScheme scheme = ingest::BuildLabelScheme(train);

  PreparedData data;
  std::size_t discarded = 0;
  for (const auto &raw : train) {
    data.train.push_back(ingest::BuildExample(raw, vocab, scheme, &discarded));
    data.discarded += discarded;
  }
  for (const auto &raw : dev) {
    try {
      data.dev.push_back(ingest::BuildExample(raw, vocab, scheme, &discarded));
      data.discarded += discarded;
    } catch (const AnnotationError &e) {
      throw AnnotationError(fmt::format("dev stream '{}': {}", raw.annotation.stream_id, e.what()));
    }
  }
  std::optional<encoders::TfIdfStats> tfidf;
  if (config.encoder.variant == encoders::EncoderVariant::kWordTfIdf) {
    tfidf = encoders::FitTfIdf(data.train, vocab.size());
  }
  data.initial = InitModel(config, std::move(scheme), std::move(vocab), tfidf ? &*tfidf : nullptr);
  return data;
}

double DevScore(Model &model, std::span<const ingest::StreamExample> dev) {
  if (model.config.head == Head::kBio) {
    std::vector<std::vector<int>> gold, predicted;
    for (const auto &s : dev) {
      gold.push_back(s.gold_labels);
      predicted.push_back(PredictBio(model, s));
    }
    return evalkit::EvalBinLevel(gold, predicted, evalkit::Aggregation::kMicro).f1;
  }
  std::vector<std::vector<evalkit::SubEventSpan>> gold;
  std::vector<std::vector<int>> predicted;
  for (const auto &s : dev) {
    gold.push_back(s.spans);
    predicted.push_back(PredictBinary(model, s));
  }
  return evalkit::EvalBinaryEvent(gold, predicted, evalkit::Aggregation::kMicro).f1;
}

std::vector<double> ClassWeights(const ModelConfig &config, std::size_t num_classes,
                                 std::span<const ingest::StreamExample> train) {
  std::vector<double> counts(num_classes, 0.0);
  double total = 0.0;
  for (const auto &s : train) {
    for (int y : Targets(config, s)) {
      counts.at(static_cast<std::size_t>(y)) += 1.0;
      total += 1.0;
    }
  }
  std::vector<double> weights(num_classes, 0.0);
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (counts[c] > 0.0) weights[c] = total / (static_cast<double>(num_classes) * counts[c]);
  }
  return weights;
}

TrainResult Train(Model model, std::span<const ingest::StreamExample> train,
                  std::span<const ingest::StreamExample> dev, std::ostream *log) {
  const ModelConfig config = model.config;
  config.Validate();
  if (train.empty()) throw ConfigError("training set is empty");
  std::span<const ingest::StreamExample> selection = dev.empty() ? train : dev;

  std::vector<double> weights;
  if (config.class_weighting) {
    weights = ClassWeights(config, config.NumClasses(model.scheme), train);
  }
  std::vector<std::vector<int>> targets;
  for (const auto &s : train) targets.push_back(Targets(config, s));

  const ad::Rng root(config.seed);
  ad::Rng shuffle_rng = root.Split("shuffle");
  ad::Rng dropout_rng = root.Split("dropout");
  ad::Adam adam(config.adam);

  TrainResult result{model, {}, 0, -1.0};
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  int since_best = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.Below(i)]);
    }
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const auto &stream = train[idx];
      ad::ZeroGrads(model.params);
      ad::Graph graph;
      ad::Var logits = Forward(model, graph, stream, ad::Mode::kTrain, dropout_rng);
      ad::Var loss = ad::SoftmaxCrossEntropy(logits, targets[idx], weights);
      const double value = loss.value()[0];
      if (!std::isfinite(value)) {
        throw std::runtime_error(fmt::format("non-finite loss {} on stream '{}' in epoch {}", value,
                                             stream.stream_id, epoch));
      }
      loss_sum += value;
      graph.Backward(loss);
      adam.Step(model.params);
    }
    const double train_loss = loss_sum / static_cast<double>(train.size());
    const double dev_f1 = DevScore(model, selection);
    result.curve.push_back({epoch, train_loss, dev_f1});
    if (log != nullptr) {
      fmt::print(*log, "epoch {:3d}  loss {:.6f}  dev_f1 {:.4f}\n", epoch, train_loss, dev_f1);
    }
    if (dev_f1 > result.best_dev_f1) {
      result.best_dev_f1 = dev_f1;
      result.best_epoch = epoch;
      result.model.params = model.params;
      since_best = 0;
    } else if (result.best_dev_f1 > 0.0 && ++since_best >= config.patience) {
      break;
    }
    if (config.patience == 0) break;
  }
  for (auto &[name, tensor] : result.model.params) tensor.DropGrad();
  return result;
}

void WriteLearningCurve(std::ostream &out, std::span<const EpochRecord> curve) {
  out << "epoch,train_loss,dev_f1\n";
  for (const auto &r : curve) fmt::print(out, "{},{:.17g},{:.17g}\n", r.epoch, r.train_loss, r.dev_f1);
}

}  // namespace subevent::labeler
