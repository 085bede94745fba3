#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "subevent/autodiff/adam.h"
#include "subevent/autodiff/graph.h"
#include "subevent/autodiff/ops.h"
#include "subevent/autodiff/parameters.h"
#include "subevent/autodiff/rng.h"
#include "subevent/encoders/encoder.h"
#include "subevent/evalkit/label_scheme.h"
#include "subevent/ingest/stream.h"
#include "subevent/ingest/vocab.h"

namespace subevent::labeler {

using evalkit::LabelScheme;

enum class Head { kBio, kBinary };

std::string ToString(Head head);
Head ParseHead(std::string_view name);

// Binary head class order.
inline constexpr int kNoEvent = 0;
inline constexpr int kEvent = 1;

struct ModelConfig {
  encoders::EncoderConfig encoder;
  bool chronological = true;
  Head head = Head::kBio;
  // Width of the chronological LSTM, and of the hidden layer of the per-bin
  // MLP used when chronological = false.
  std::size_t d_chrono = 128;
  double dropout = 0.3;
  std::uint64_t seed = 1;
  int epochs = 100;
  int patience = 10;
  ad::AdamConfig adam;
  // Inverse-frequency class weights in the loss.
  bool class_weighting = false;
  int vocab_min_count = 2;

  void Validate() const;
  std::size_t NumClasses(const LabelScheme &scheme) const;
};

// Everything needed to run a trained model: configuration, label inventory,
// vocabulary and the learned tensors.
struct Model {
  ModelConfig config;
  LabelScheme scheme;
  ingest::Vocab vocab;
  ad::ParameterSet params;
};

// Fresh parameters, deterministic in config.seed. `tfidf` is required for the
// word-tfidf variant and ignored otherwise.
Model InitModel(const ModelConfig &config, LabelScheme scheme, ingest::Vocab vocab,
                const encoders::TfIdfStats *tfidf = nullptr);

// Per-bin logits [n_bins x C]. Chronological: bin vectors -> dropout ->
// left-to-right LSTM from a zero state -> dropout -> dense. Otherwise each
// bin vector -> dropout -> one-hidden-layer ReLU MLP, independently.
ad::Var Forward(Model &model, ad::Graph &graph, const ingest::StreamExample &stream, ad::Mode mode,
                ad::Rng &dropout_rng);

// Eval-mode logits as a plain tensor.
ad::Tensor ComputeLogits(Model &model, const ingest::StreamExample &stream);

// Row-wise argmax; ties go to the lowest class id.
std::vector<int> ArgmaxRows(const ad::Tensor &logits);

// BIO label ids per bin (head must be bio). No transition model: illegal
// sequences are left for span decoding to repair.
std::vector<int> PredictBio(Model &model, const ingest::StreamExample &stream);
// kEvent/kNoEvent per bin (head must be binary).
std::vector<int> PredictBinary(Model &model, const ingest::StreamExample &stream);

// Training targets for the model's head: BIO ids or event/no-event.
std::vector<int> Targets(const ModelConfig &config, const ingest::StreamExample &stream);

}  // namespace subevent::labeler
