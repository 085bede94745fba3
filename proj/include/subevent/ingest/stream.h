#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "subevent/evalkit/bio.h"
#include "subevent/evalkit/label_scheme.h"
#include "subevent/ingest/vocab.h"

namespace subevent::ingest {

using evalkit::LabelScheme;
using evalkit::SubEventSpan;

struct TweetRecord {
  std::string id;
  std::int64_t timestamp = 0;  // unix seconds
  std::string text;

  friend bool operator==(const TweetRecord &, const TweetRecord &) = default;
};

// Gold annotation of one stream. Bins cover [start, end) in steps of
// `interval` seconds.
struct Annotation {
  std::string stream_id;
  std::int64_t start = 0;
  std::int64_t end = 0;
  std::int64_t interval = 60;
  std::vector<SubEventSpan> spans;

  std::size_t num_bins() const;
  friend bool operator==(const Annotation &, const Annotation &) = default;
};

// A stream as stored on disk: annotation plus its posts.
struct RawStream {
  Annotation annotation;
  std::vector<TweetRecord> tweets;

  friend bool operator==(const RawStream &, const RawStream &) = default;
};

struct TokenizedTweet {
  std::vector<int> tokens;
};

struct Bin {
  std::size_t index = 0;
  std::int64_t start_time = 0;
  std::vector<TokenizedTweet> tweets;

  std::size_t tweet_count() const { return tweets.size(); }
  std::size_t word_count() const;
};

struct StreamExample {
  std::string stream_id;
  std::vector<Bin> bins;
  std::vector<int> gold_labels;
  std::vector<SubEventSpan> spans;

  std::vector<std::size_t> TweetCounts() const;
};

struct BinAssignment {
  std::vector<std::vector<TweetRecord>> bins;  // chronological within each bin
  std::size_t discarded = 0;                   // outside [start, end)
};

// Sorts stably by (timestamp, id) and places each tweet in bin
// floor((ts - start) / interval). Produces ceil((end - start) / interval)
// bins, empty ones included. Throws ConfigError for interval <= 0 or
// end <= start.
BinAssignment AssignBins(std::span<const TweetRecord> tweets, std::int64_t stream_start,
                         std::int64_t stream_end, std::int64_t interval);

// Gold BIO ids for the bins of a stream; throws AnnotationError on overlapping
// or out-of-range spans.
std::vector<int> AlignLabels(std::size_t n_bins, std::span<const SubEventSpan> spans,
                             const LabelScheme &scheme);

// Bins, tokenizes and labels a raw stream. `discarded` receives the number of
// tweets outside the annotation window.
StreamExample BuildExample(const RawStream &raw, const Vocab &vocab, const LabelScheme &scheme,
                           std::size_t *discarded = nullptr);

// Vocabulary over all tweet texts of the given streams.
Vocab BuildVocab(std::span<const RawStream> streams, int min_count);

// Sorted distinct span types over the given streams.
LabelScheme BuildLabelScheme(std::span<const RawStream> streams);

}  // namespace subevent::ingest
