#include "subevent/encoders/tfidf.h"

#include <cmath>
#include <set>
#include <stdexcept>

#include "subevent/errors.h"

namespace subevent::encoders {

double TfIdfStats::Idf(int token) const {
  const double df = static_cast<std::size_t>(token) < document_frequency.size()
                        ? document_frequency[static_cast<std::size_t>(token)]
                        : 0.0;
  return std::log((1.0 + static_cast<double>(num_documents)) / (1.0 + df)) + 1.0;
}

std::vector<double> TfIdfStats::IdfVector() const {
  std::vector<double> idf(document_frequency.size());
  for (std::size_t i = 0; i < idf.size(); ++i) idf[i] = Idf(static_cast<int>(i));
  return idf;
}

TfIdfStats FitTfIdf(std::span<const ingest::StreamExample> training, std::size_t vocab_size) {
  TfIdfStats stats;
  stats.document_frequency.assign(vocab_size, 0.0);
  for (const auto &stream : training) {
    for (const auto &bin : stream.bins) {
      ++stats.num_documents;
      std::set<int> seen;
      for (const auto &tweet : bin.tweets) seen.insert(tweet.tokens.begin(), tweet.tokens.end());
      for (int tok : seen) {
        if (static_cast<std::size_t>(tok) < vocab_size) stats.document_frequency[tok] += 1.0;
      }
    }
  }
  if (stats.num_documents == 0) throw ConfigError("tf-idf needs at least one training bin");
  return stats;
}

ad::Tensor TfIdfVector(const ingest::Bin &bin, std::span<const double> idf) {
  ad::Tensor x({idf.size()});
  for (const auto &tweet : bin.tweets) {
    for (int tok : tweet.tokens) {
      if (tok < 0 || static_cast<std::size_t>(tok) >= x.size()) {
        throw std::invalid_argument("tf-idf: token id outside vocabulary");
      }
      x[static_cast<std::size_t>(tok)] += 1.0;
    }
  }
  double norm = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] *= idf[i];
    norm += x[i] * x[i];
  }
  if (norm > 0.0) {
    const double inv = 1.0 / std::sqrt(norm);
    for (double &v : x.values()) v *= inv;
  }
  return x;
}

}  // namespace subevent::encoders
