#include "subevent/synth/generator.h"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "subevent/autodiff/rng.h"
#include "subevent/errors.h"

namespace subevent::synth {
namespace {

using ad::Rng;
using evalkit::SubEventSpan;
using ingest::TweetRecord;

constexpr int kMaxPlacementAttempts = 10'000;

// Knuth's multiplicative method; exact and portable for the rates used here.
std::size_t Poisson(double lambda, Rng &rng) {
  const double limit = std::exp(-lambda);
  std::size_t k = 0;
  double p = rng.Uniform();
  while (p > limit) {
    ++k;
    p *= rng.Uniform();
  }
  return k;
}

// Support {1, 2, ...} with the given mean.
int Geometric(double mean, Rng &rng) {
  if (mean <= 1.0) return 1;
  const double p = 1.0 / mean;
  const double u = 1.0 - rng.Uniform();  // (0, 1]
  return 1 + static_cast<int>(std::floor(std::log(u) / std::log(1.0 - p)));
}

bool Probability(double p) { return p >= 0.0 && p <= 1.0; }

std::string Sanitize(const std::string &name) {
  std::string out = name;
  for (char &c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return out;
}

class Sampler {
 public:
  explicit Sampler(const SynthConfig &config) : config_(config) {
    double total = 0.0;
    for (std::size_t r = 1; r <= config.noise_vocab; ++r) {
      total += 1.0 / std::pow(static_cast<double>(r), config.zipf_exponent);
      zipf_cdf_.push_back(total);
    }
    for (double &c : zipf_cdf_) c /= total;
    for (std::size_t t = 0; t < config.types.size(); ++t) cues_.push_back(CueTokens(config, t));
  }

  std::string NoiseWord(Rng &rng) const {
    const double u = rng.Uniform();
    auto it = std::upper_bound(zipf_cdf_.begin(), zipf_cdf_.end(), u);
    std::size_t rank = static_cast<std::size_t>(it - zipf_cdf_.begin());
    return fmt::format("w{}", std::min(rank, zipf_cdf_.size() - 1));
  }

  // `type` < 0 means no cue; cue_p and reaction_p are per-tweet probabilities.
  std::string Tweet(int type, double cue_p, double reaction_p, const std::string &hashtag,
                    Rng &rng) const {
    const std::size_t span = config_.max_words - config_.min_words + 1;
    const std::size_t n = config_.min_words + rng.Below(span);
    std::vector<std::string> words;
    words.reserve(n + 3);
    for (std::size_t i = 0; i < n; ++i) words.push_back(NoiseWord(rng));
    if (type >= 0 && rng.Uniform() < cue_p) {
      const auto &cues = cues_[static_cast<std::size_t>(type)];
      words[rng.Below(n)] = cues[rng.Below(cues.size())];
    }
    if (rng.Uniform() < reaction_p) {
      words[rng.Below(n)] = fmt::format("react{}", rng.Below(config_.reaction_tokens));
    }
    if (rng.Uniform() < config_.mention_prob) {
      words.insert(words.begin(), fmt::format("@fan{}", rng.Below(1000)));
    }
    if (rng.Uniform() < config_.hashtag_prob) words.push_back("#" + hashtag);
    if (rng.Uniform() < config_.url_prob) {
      words.push_back(fmt::format("https://t.co/{:08x}", rng.Below(1ULL << 32)));
    }
    std::string text;
    for (const auto &w : words) {
      if (!text.empty()) text += ' ';
      text += w;
    }
    return text;
  }

 private:
  const SynthConfig &config_;
  std::vector<double> zipf_cdf_;
  std::vector<std::vector<std::string>> cues_;
};

std::vector<SubEventSpan> PlaceSpans(const SynthConfig &config, Rng &rng) {
  const int n = static_cast<int>(config.n_bins);
  std::vector<SubEventSpan> spans;
  // Occupied bins plus one bin of margin on each side of every span.
  std::vector<bool> blocked(config.n_bins, false);
  int attempts = 0;
  while (spans.size() < config.spans_per_stream) {
    if (++attempts > kMaxPlacementAttempts) {
      throw ConfigError(fmt::format(
          "could not place {} non-overlapping spans in {} bins after {} attempts; config too dense",
          config.spans_per_stream, config.n_bins, kMaxPlacementAttempts));
    }
    const auto type = rng.Below(config.types.size());
    const int length = std::min(Geometric(config.types[type].mean_length, rng), n);
    const int first = static_cast<int>(rng.Below(static_cast<std::uint64_t>(n - length + 1)));
    const int last = first + length - 1;
    if (std::any_of(blocked.begin() + first, blocked.begin() + last + 1, [](bool b) { return b; })) {
      continue;
    }
    for (int b = std::max(0, first - 1); b <= std::min(n - 1, last + 1); ++b) blocked[b] = true;
    spans.push_back({config.types[type].name, first, last});
  }
  std::sort(spans.begin(), spans.end(),
            [](const SubEventSpan &a, const SubEventSpan &b) { return a.first_bin < b.first_bin; });
  return spans;
}

}  // namespace

void SynthConfig::Validate() const {
  if (n_streams == 0 || n_bins == 0) throw ConfigError("n_streams and n_bins must be positive");
  if (interval <= 0) throw ConfigError("interval must be positive");
  if (start_time < 0) throw ConfigError("start_time must be non-negative");
  if (!(base_rate > 0.0) || !(burst_rate > 0.0)) throw ConfigError("rates must be positive");
  if (base_rate > 500.0 || burst_rate > 500.0) throw ConfigError("rates above 500 per bin are not supported");
  if (types.empty()) throw ConfigError("at least one sub-event type is required");
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (types[i].name.empty()) throw ConfigError("sub-event type names must be non-empty");
    if (!(types[i].mean_length >= 1.0)) throw ConfigError("mean span length must be >= 1");
    if (!(types[i].intensity >= 0.0)) throw ConfigError("type intensity must be >= 0");
    for (std::size_t j = 0; j < i; ++j) {
      if (Sanitize(types[i].name) == Sanitize(types[j].name)) {
        throw ConfigError(fmt::format("types '{}' and '{}' would share cue tokens", types[j].name,
                                      types[i].name));
      }
    }
  }
  if (cues_per_type == 0 || noise_vocab == 0 || reaction_tokens == 0) {
    throw ConfigError("cue, reaction and noise vocabularies must be non-empty");
  }
  for (double p : {cue_prob, cue_leak, reaction_prob, url_prob, mention_prob, hashtag_prob}) {
    if (!Probability(p)) throw ConfigError(fmt::format("probability {} outside [0, 1]", p));
  }
  if (!Probability(rate_decay) || !Probability(cue_decay)) {
    throw ConfigError("decay factors must lie in [0, 1]");
  }
  if (min_words == 0 || min_words > max_words) throw ConfigError("need 1 <= min_words <= max_words");
}

std::vector<std::string> CueTokens(const SynthConfig &config, std::size_t type) {
  std::vector<std::string> out;
  const std::string stem = Sanitize(config.types.at(type).name);
  for (std::size_t k = 0; k < config.cues_per_type; ++k) out.push_back(fmt::format("{}_cue{}", stem, k));
  return out;
}

ingest::RawStream GenerateStream(const SynthConfig &config, std::size_t index) {
  config.Validate();
  const Sampler sampler(config);
  Rng rng = Rng(config.seed).Split(static_cast<std::uint64_t>(index));
  Rng span_rng = rng.Split("spans");
  Rng text_rng = rng.Split("text");

  ingest::RawStream raw;
  ingest::Annotation &ann = raw.annotation;
  ann.stream_id = fmt::format("match-{:02d}", index);
  ann.start = config.start_time + static_cast<std::int64_t>(index) * 86'400;
  ann.interval = config.interval;
  ann.end = ann.start + static_cast<std::int64_t>(config.n_bins) * config.interval;
  ann.spans = PlaceSpans(config, span_rng);

  // Per-bin generation plan.
  struct BinPlan {
    double rate;
    int type = -1;
    double cue_p = 0.0;
    double reaction_p = 0.0;
  };
  std::vector<BinPlan> plan(config.n_bins, BinPlan{config.base_rate});
  std::vector<bool> in_span(config.n_bins, false);
  for (const auto &span : ann.spans) {
    const int t = static_cast<int>(std::find_if(config.types.begin(), config.types.end(),
                                                [&](const SubEventType &x) { return x.name == span.type; }) -
                                   config.types.begin());
    const double excess = (config.burst_rate - config.base_rate) * config.types[t].intensity;
    for (int b = span.first_bin; b <= span.last_bin; ++b) {
      const int j = b - span.first_bin;
      BinPlan &p = plan[b];
      p.rate = std::max(config.base_rate + excess * std::pow(config.rate_decay, j), 0.1);
      p.type = t;
      p.cue_p = config.cue_prob * std::pow(config.cue_decay, j);
      p.reaction_p = config.reaction_prob;
      in_span[b] = true;
    }
    for (int b : {span.first_bin - 1, span.last_bin + 1}) {
      if (b >= 0 && b < static_cast<int>(config.n_bins)) {
        plan[b].type = t;
        plan[b].cue_p = config.cue_leak;
      }
    }
  }
  for (std::size_t k = 0; k < config.distractor_bursts; ++k) {
    // Off-topic chatter in a bin at least two bins away from every span.
    for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
      const auto b = static_cast<std::size_t>(span_rng.Below(config.n_bins));
      bool clear = true;
      for (std::size_t d = (b >= 2 ? b - 2 : 0); d <= std::min(config.n_bins - 1, b + 2); ++d) {
        clear = clear && !in_span[d];
      }
      if (clear && plan[b].rate == config.base_rate) {
        plan[b].rate = config.burst_rate;
        break;
      }
    }
  }

  const std::string hashtag = fmt::format("match{}", index);
  for (std::size_t b = 0; b < config.n_bins; ++b) {
    const std::size_t count = Poisson(plan[b].rate, text_rng);
    const std::int64_t bin_start = ann.start + static_cast<std::int64_t>(b) * config.interval;
    for (std::size_t i = 0; i < count; ++i) {
      TweetRecord tweet;
      tweet.timestamp = bin_start + static_cast<std::int64_t>(
                                        text_rng.Below(static_cast<std::uint64_t>(config.interval)));
      tweet.text = sampler.Tweet(plan[b].type, plan[b].cue_p, plan[b].reaction_p, hashtag, text_rng);
      raw.tweets.push_back(std::move(tweet));
    }
  }
  std::stable_sort(raw.tweets.begin(), raw.tweets.end(),
                   [](const TweetRecord &a, const TweetRecord &b) { return a.timestamp < b.timestamp; });
  for (std::size_t i = 0; i < raw.tweets.size(); ++i) {
    raw.tweets[i].id = fmt::format("{}-{:06d}", ann.stream_id, i);
  }
  return raw;
}

std::vector<ingest::RawStream> Generate(const SynthConfig &config) {
  config.Validate();
  std::vector<ingest::RawStream> streams;
  streams.reserve(config.n_streams);
  for (std::size_t i = 0; i < config.n_streams; ++i) streams.push_back(GenerateStream(config, i));
  return streams;
}

}  // namespace subevent::synth
