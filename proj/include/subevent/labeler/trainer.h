#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "subevent/ingest/stream.h"
#include "subevent/labeler/model.h"

namespace subevent::labeler {

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_f1 = 0.0;
};

struct TrainResult {
  Model model;  // parameters of the best dev epoch
  std::vector<EpochRecord> curve;
  int best_epoch = 0;
  double best_dev_f1 = 0.0;
};

// Training inputs after vocabulary, label scheme and tf-idf fitting.
struct PreparedData {
  Model initial;
  std::vector<ingest::StreamExample> train;
  std::vector<ingest::StreamExample> dev;
  std::size_t discarded = 0;  // tweets outside their stream's window
};

// Builds vocabulary and label scheme from the training streams only and
// initializes the model. Throws AnnotationError naming the label when a dev
// span uses a type unseen in training.
PreparedData Prepare(const ModelConfig &config, std::span<const ingest::RawStream> train,
                     std::span<const ingest::RawStream> dev);

// Dev score used for model selection: bin-level micro F1 for the bio head,
// binary event-level micro F1 for the binary head.
double DevScore(Model &model, std::span<const ingest::StreamExample> dev);

// Inverse-frequency weights n / (C * count_c) over the training targets;
// classes that never occur get weight 0.
std::vector<double> ClassWeights(const ModelConfig &config, std::size_t num_classes,
                                 std::span<const ingest::StreamExample> train);

// Epoch loop: seeded shuffle, one Adam step per stream, dev evaluation after
// each epoch, early stopping after `patience` epochs without improvement.
// The patience clock starts once the dev score is non-zero: an all-O
// warm-up phase is not a plateau.
// An empty dev set selects on the training set. Progress lines go to `log`
// when given. Throws std::runtime_error naming the stream on a non-finite
// loss.
TrainResult Train(Model model, std::span<const ingest::StreamExample> train,
                  std::span<const ingest::StreamExample> dev, std::ostream *log = nullptr);

// Header `epoch,train_loss,dev_f1`, values with 17 significant digits.
void WriteLearningCurve(std::ostream &out, std::span<const EpochRecord> curve);

}  // namespace subevent::labeler
