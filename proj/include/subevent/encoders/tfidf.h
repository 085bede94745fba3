#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "subevent/autodiff/tensor.h"
#include "subevent/ingest/stream.h"

namespace subevent::encoders {

// Document frequencies over training bins; each bin is one document.
struct TfIdfStats {
  std::vector<double> document_frequency;  // indexed by vocab id
  std::size_t num_documents = 0;

  // Smoothed idf = ln((1 + N) / (1 + df)) + 1.
  double Idf(int token) const;
  std::vector<double> IdfVector() const;
};

// Throws ConfigError when there is no training bin.
TfIdfStats FitTfIdf(std::span<const ingest::StreamExample> training, std::size_t vocab_size);

// L2-normalized tf-idf vector of a bin (all zeros for an empty bin).
ad::Tensor TfIdfVector(const ingest::Bin &bin, std::span<const double> idf);

}  // namespace subevent::encoders
