#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "subevent/ingest/stream.h"

namespace subevent::synth {

struct SubEventType {
  std::string name;
  double mean_length = 2.0;  // geometric span length in bins, support >= 1
  // Scales the excess rate (burst_rate - base_rate) at the span onset; quiet
  // types such as cards barely raise the posting rate.
  double intensity = 1.0;
};

struct SynthConfig {
  std::size_t n_streams = 20;
  std::size_t n_bins = 95;
  std::int64_t interval = 60;
  std::int64_t start_time = 1'400'000'000;
  double base_rate = 8.0;
  double burst_rate = 40.0;
  std::vector<SubEventType> types = {
      {"goal", 2.0, 1.0}, {"kick-off", 2.0, 1.0}, {"half-time", 2.0, 1.0}, {"yellow-card", 2.0, 1.0}};
  std::size_t spans_per_stream = 12;
  std::size_t cues_per_type = 5;
  std::size_t noise_vocab = 500;
  double zipf_exponent = 1.0;
  double cue_prob = 0.7;
  // Cue probability for tweets in the bins right before and after a span.
  double cue_leak = 0.02;
  // Inside a span, bin j (0-based from the onset) has excess rate and cue
  // probability scaled by decay^j: sub-events peak at onset and fade.
  double rate_decay = 0.6;
  double cue_decay = 0.0;
  // Probability that a span tweet carries one of the shared reaction tokens,
  // which signal "something happened" without naming the type.
  double reaction_prob = 0.5;
  std::size_t reaction_tokens = 5;
  // Bursts of off-topic chatter with no sub-event, per stream.
  std::size_t distractor_bursts = 0;
  std::size_t min_words = 4;
  std::size_t max_words = 12;
  double url_prob = 0.1;
  double mention_prob = 0.15;
  double hashtag_prob = 0.1;
  std::uint64_t seed = 7;

  // Throws ConfigError on non-positive rates, empty type inventory, bad
  // probabilities or inconsistent word counts.
  void Validate() const;
};

// Cue tokens of type k; disjoint across types and from the noise and
// reaction vocabularies.
std::vector<std::string> CueTokens(const SynthConfig &config, std::size_t type);

// Stream ids are "match-00", "match-01", ... in generation order; each
// stream draws from its own seed split, so output is a pure function of
// config. Throws ConfigError when spans cannot be placed without overlap in
// 10^4 attempts.
std::vector<ingest::RawStream> Generate(const SynthConfig &config);
ingest::RawStream GenerateStream(const SynthConfig &config, std::size_t index);

}  // namespace subevent::synth
