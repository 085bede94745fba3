#include "subevent/encoders/encoder.h"

#include <cmath>

#include <fmt/format.h>

#include "subevent/autodiff/ops.h"
#include "subevent/errors.h"

namespace subevent::encoders {
namespace {

using ad::Graph;
using ad::ParameterSet;
using ad::Rng;
using ad::Tensor;
using ad::Var;

Tensor &Require(ParameterSet &params, const std::string &name) {
  auto it = params.find(name);
  if (it == params.end()) throw ConfigError(fmt::format("missing parameter tensor '{}'", name));
  return it->second;
}

void Put(ParameterSet &params, const std::string &name, Tensor t, bool trainable = true) {
  t.set_requires_grad(trainable);
  params.insert_or_assign(name, std::move(t));
}

void InitAttention(const std::string &prefix, std::size_t d, Rng &rng, ParameterSet &params) {
  Rng r = rng.Split(prefix);
  Put(params, prefix + ".W", GlorotUniform({d, d}, d, d, r));
  Put(params, prefix + ".b", Tensor::Zeros({d}));
  Put(params, prefix + ".v", GlorotUniform({d}, d, 1, r));
}

AttentionVars BindAttention(const std::string &prefix, Graph &graph, ParameterSet &params) {
  return {graph.Parameter(Require(params, prefix + ".W")),
          graph.Parameter(Require(params, prefix + ".b")),
          graph.Parameter(Require(params, prefix + ".v"))};
}

// Embeds every word of the bin in chronological order.
Var EmbedWords(const EncoderVars &vars, const ingest::Bin &bin) {
  std::vector<int> ids;
  ids.reserve(bin.word_count());
  for (const auto &t : bin.tweets) ids.insert(ids.end(), t.tokens.begin(), t.tokens.end());
  return ad::Embedding(vars.embed, ids);
}

Var TweetVector(const EncoderConfig &config, const EncoderVars &vars,
                const ingest::TokenizedTweet &tweet) {
  Var words = ad::Embedding(vars.embed, tweet.tokens);
  if (config.tweet_lstm) return ad::LstmFinalState(words, *vars.tweet_lstm);
  return ad::Pool(ad::PoolKind::kMean, words);
}

Var TweetSequence(const EncoderConfig &config, const EncoderVars &vars, const ingest::Bin &bin) {
  std::vector<Var> rows;
  rows.reserve(bin.tweets.size());
  for (const auto &t : bin.tweets) rows.push_back(TweetVector(config, vars, t));
  return ad::Stack(rows);
}

Var CnnAvg(const EncoderVars &vars, Var sequence) {
  return ad::Pool(ad::PoolKind::kMean, ad::Relu(ad::Conv1d(sequence, vars.cnn_kernels, vars.cnn_bias)));
}

}  // namespace

std::string ToString(EncoderVariant variant) {
  switch (variant) {
    case EncoderVariant::kWordTfIdf: return "word-tfidf";
    case EncoderVariant::kWordAvg: return "word-avg";
    case EncoderVariant::kWordCnnAvg: return "word-cnn-avg";
    case EncoderVariant::kWordAttention: return "word-attention";
    case EncoderVariant::kTweetAvg: return "tweet-avg";
    case EncoderVariant::kTweetAttention: return "tweet-attention";
    case EncoderVariant::kTweetCnn: return "tweet-cnn";
  }
  return "?";
}

EncoderVariant ParseVariant(std::string_view name) {
  for (EncoderVariant v : kAllVariants) {
    if (ToString(v) == name) return v;
  }
  throw ConfigError(fmt::format("unknown encoder variant '{}'", name));
}

bool IsTweetLevel(EncoderVariant variant) {
  return variant == EncoderVariant::kTweetAvg || variant == EncoderVariant::kTweetAttention ||
         variant == EncoderVariant::kTweetCnn;
}

void EncoderConfig::Validate() const {
  if (d_embed == 0 || d_bin == 0 || d_tweet_lstm == 0 || cnn_window == 0) {
    throw ConfigError("encoder dimensions and CNN window must be positive");
  }
  if (tweet_lstm && !IsTweetLevel(variant)) {
    throw ConfigError(fmt::format("tweet-level LSTM is not available for {}", ToString(variant)));
  }
  if (two_level_attention && variant != EncoderVariant::kWordAttention) {
    throw ConfigError("two-level attention applies to word-attention only");
  }
  std::size_t natural = d_bin;
  switch (variant) {
    case EncoderVariant::kWordAvg:
    case EncoderVariant::kWordAttention: natural = d_embed; break;
    case EncoderVariant::kTweetAvg:
    case EncoderVariant::kTweetAttention: natural = tweet_width(); break;
    default: break;
  }
  if (natural != d_bin) {
    throw ConfigError(fmt::format("{} produces {}-wide bin vectors but d_bin is {}",
                                  ToString(variant), natural, d_bin));
  }
}

Tensor GlorotUniform(ad::Shape shape, std::size_t fan_in, std::size_t fan_out, Rng &rng) {
  Tensor t(std::move(shape));
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double &v : t.values()) v = rng.Uniform(-limit, limit);
  return t;
}

void InitLstmParams(const std::string &prefix, std::size_t d_in, std::size_t d_h, Rng &rng,
                    ParameterSet &params) {
  Rng r = rng.Split(prefix);
  Put(params, prefix + ".W", GlorotUniform({d_in, 4 * d_h}, d_in, 4 * d_h, r));
  Put(params, prefix + ".U", GlorotUniform({d_h, 4 * d_h}, d_h, 4 * d_h, r));
  Tensor bias({4 * d_h});
  for (std::size_t j = d_h; j < 2 * d_h; ++j) bias[j] = 1.0;
  Put(params, prefix + ".b", std::move(bias));
}

ad::LstmWeights BindLstm(const std::string &prefix, Graph &graph, ParameterSet &params) {
  return {graph.Parameter(Require(params, prefix + ".W")),
          graph.Parameter(Require(params, prefix + ".U")),
          graph.Parameter(Require(params, prefix + ".b"))};
}

void InitEncoderParams(const EncoderConfig &config, std::size_t vocab_size,
                       const TfIdfStats *tfidf, Rng &rng, ParameterSet &params) {
  config.Validate();
  const std::size_t d = config.d_embed;
  if (config.variant == EncoderVariant::kWordTfIdf) {
    if (tfidf == nullptr) throw ConfigError("word-tfidf needs fitted tf-idf statistics");
    Rng r = rng.Split("tfidf");
    Put(params, "tfidf.W", GlorotUniform({vocab_size, config.d_bin}, vocab_size, config.d_bin, r));
    Put(params, "tfidf.b", Tensor::Zeros({config.d_bin}));
    std::vector<double> idf = tfidf->IdfVector();
    idf.resize(vocab_size, std::log(1.0 + static_cast<double>(tfidf->num_documents)) + 1.0);
    Put(params, "tfidf.idf", Tensor({vocab_size}, std::move(idf)), false);
    return;
  }

  Rng er = rng.Split("embed");
  Tensor embed({vocab_size, d});
  for (double &v : embed.values()) v = er.Uniform(-0.1, 0.1);
  Put(params, "embed", std::move(embed));

  if (config.tweet_lstm) InitLstmParams("tl", d, config.d_tweet_lstm, rng, params);

  switch (config.variant) {
    case EncoderVariant::kWordCnnAvg:
    case EncoderVariant::kTweetCnn: {
      const std::size_t d_in = config.variant == EncoderVariant::kWordCnnAvg ? d : config.tweet_width();
      const std::size_t w = config.cnn_window;
      Rng r = rng.Split("cnn");
      Put(params, "cnn.K", GlorotUniform({w, d_in, config.d_bin}, w * d_in, w * config.d_bin, r));
      Put(params, "cnn.b", Tensor::Zeros({config.d_bin}));
      break;
    }
    case EncoderVariant::kWordAttention:
      InitAttention("att", d, rng, params);
      if (config.two_level_attention) InitAttention("att2", d, rng, params);
      break;
    case EncoderVariant::kTweetAttention:
      InitAttention("att", config.tweet_width(), rng, params);
      break;
    default: break;
  }
}

AttentionResult AttentionPool(Var sequence, const AttentionVars &vars) {
  Var hidden = ad::Tanh(ad::AddBias(ad::MatMul(sequence, vars.weight), vars.bias));
  Var weights = ad::Softmax(ad::MatMul(hidden, vars.context));
  return {ad::WeightedSum(sequence, weights), weights};
}

EncoderVars BindEncoder(const EncoderConfig &config, Graph &graph, ParameterSet &params) {
  EncoderVars vars;
  if (config.variant == EncoderVariant::kWordTfIdf) {
    vars.tfidf_weight = graph.Parameter(Require(params, "tfidf.W"));
    vars.tfidf_bias = graph.Parameter(Require(params, "tfidf.b"));
    const Tensor &idf = Require(params, "tfidf.idf");
    vars.idf.assign(idf.values().begin(), idf.values().end());
    return vars;
  }
  vars.embed = graph.Parameter(Require(params, "embed"));
  if (config.tweet_lstm) vars.tweet_lstm = BindLstm("tl", graph, params);
  switch (config.variant) {
    case EncoderVariant::kWordCnnAvg:
    case EncoderVariant::kTweetCnn:
      vars.cnn_kernels = graph.Parameter(Require(params, "cnn.K"));
      vars.cnn_bias = graph.Parameter(Require(params, "cnn.b"));
      break;
    case EncoderVariant::kWordAttention:
    case EncoderVariant::kTweetAttention:
      vars.attention = BindAttention("att", graph, params);
      if (config.two_level_attention) vars.tweet_attention = BindAttention("att2", graph, params);
      break;
    default: break;
  }
  return vars;
}

Var EncodeBin(const EncoderConfig &config, const EncoderVars &vars, Graph &graph,
              const ingest::Bin &bin) {
  if (bin.tweets.empty()) return graph.Constant(Tensor::Zeros({config.d_bin}));
  switch (config.variant) {
    case EncoderVariant::kWordTfIdf: {
      Var x = graph.Constant(TfIdfVector(bin, vars.idf));
      return ad::Relu(ad::AddBias(ad::MatMul(x, vars.tfidf_weight), vars.tfidf_bias));
    }
    case EncoderVariant::kWordAvg: return ad::Pool(ad::PoolKind::kMean, EmbedWords(vars, bin));
    case EncoderVariant::kWordCnnAvg: return CnnAvg(vars, EmbedWords(vars, bin));
    case EncoderVariant::kWordAttention: {
      if (!config.two_level_attention) return AttentionPool(EmbedWords(vars, bin), vars.attention).output;
      std::vector<Var> tweets;
      for (const auto &t : bin.tweets) {
        tweets.push_back(AttentionPool(ad::Embedding(vars.embed, t.tokens), vars.attention).output);
      }
      return AttentionPool(ad::Stack(tweets), vars.tweet_attention).output;
    }
    case EncoderVariant::kTweetAvg:
      return ad::Pool(ad::PoolKind::kMean, TweetSequence(config, vars, bin));
    case EncoderVariant::kTweetAttention:
      return AttentionPool(TweetSequence(config, vars, bin), vars.attention).output;
    case EncoderVariant::kTweetCnn: return CnnAvg(vars, TweetSequence(config, vars, bin));
  }
  throw ConfigError("unhandled encoder variant");
}

}  // namespace subevent::encoders
