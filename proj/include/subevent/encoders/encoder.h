#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subevent/autodiff/graph.h"
#include "subevent/autodiff/lstm.h"
#include "subevent/autodiff/parameters.h"
#include "subevent/autodiff/rng.h"
#include "subevent/encoders/tfidf.h"
#include "subevent/ingest/stream.h"

// Bin representations: one fixed-width vector per bin, built either from the
// bin's concatenated words or from its sequence of per-tweet vectors.
namespace subevent::encoders {

enum class EncoderVariant {
  kWordTfIdf,
  kWordAvg,
  kWordCnnAvg,
  kWordAttention,
  kTweetAvg,
  kTweetAttention,
  kTweetCnn,
};

inline constexpr EncoderVariant kAllVariants[] = {
    EncoderVariant::kWordTfIdf,  EncoderVariant::kWordAvg,        EncoderVariant::kWordCnnAvg,
    EncoderVariant::kWordAttention, EncoderVariant::kTweetAvg, EncoderVariant::kTweetAttention,
    EncoderVariant::kTweetCnn};

std::string ToString(EncoderVariant variant);
// Accepts the names produced by ToString ("word-tfidf", "tweet-avg", ...).
EncoderVariant ParseVariant(std::string_view name);
bool IsTweetLevel(EncoderVariant variant);

struct EncoderConfig {
  EncoderVariant variant = EncoderVariant::kTweetAvg;
  bool tweet_lstm = false;  // TL: per-tweet LSTM instead of mean pooling
  std::size_t d_embed = 64;
  std::size_t d_tweet_lstm = 64;
  std::size_t d_bin = 64;
  std::size_t cnn_window = 3;
  // WordAttention only: attend over words within each tweet, then over
  // tweets, instead of one attention over the bin's concatenated words.
  bool two_level_attention = false;

  // Width of a tweet vector for Tweet* variants.
  std::size_t tweet_width() const { return tweet_lstm ? d_tweet_lstm : d_embed; }

  // Throws ConfigError for TL on a word-level variant, zero dimensions, or a
  // pooled/attention variant whose natural width differs from d_bin.
  void Validate() const;
};

// Creates and initializes every encoder tensor in `params`:
// embeddings uniform(-0.1, 0.1), dense/recurrent weights Glorot-uniform,
// biases zero except LSTM forget gates (1). WordTfIdf also stores the frozen
// idf vector as "tfidf.idf".
void InitEncoderParams(const EncoderConfig &config, std::size_t vocab_size,
                       const TfIdfStats *tfidf, ad::Rng &rng, ad::ParameterSet &params);

struct AttentionVars {
  ad::Var weight;   // [d x d]
  ad::Var bias;     // [d]
  ad::Var context;  // [d]
};

struct AttentionResult {
  ad::Var output;   // [d]
  ad::Var weights;  // [n], non-negative, sums to 1
};

// Additive attention: u_t = tanh(W x_t + b), alpha = softmax(u . v),
// output = sum_t alpha_t x_t.
AttentionResult AttentionPool(ad::Var sequence, const AttentionVars &vars);

// Graph handles for the encoder's parameters; bind once per graph.
struct EncoderVars {
  ad::Var embed;
  ad::Var tfidf_weight, tfidf_bias;
  std::vector<double> idf;
  ad::Var cnn_kernels, cnn_bias;
  AttentionVars attention;
  AttentionVars tweet_attention;  // second level of two-level attention
  std::optional<ad::LstmWeights> tweet_lstm;
};

EncoderVars BindEncoder(const EncoderConfig &config, ad::Graph &graph, ad::ParameterSet &params);

// Vector for one bin, [d_bin]. An empty bin yields the zero vector without
// touching any parameter.
ad::Var EncodeBin(const EncoderConfig &config, const EncoderVars &vars, ad::Graph &graph,
                  const ingest::Bin &bin);

// Glorot-uniform sample for a weight with the given fan-in/fan-out.
ad::Tensor GlorotUniform(ad::Shape shape, std::size_t fan_in, std::size_t fan_out, ad::Rng &rng);

// Standard LSTM parameter triple "<prefix>.W", "<prefix>.U", "<prefix>.b".
void InitLstmParams(const std::string &prefix, std::size_t d_in, std::size_t d_h, ad::Rng &rng,
                    ad::ParameterSet &params);
ad::LstmWeights BindLstm(const std::string &prefix, ad::Graph &graph, ad::ParameterSet &params);

}  // namespace subevent::encoders
