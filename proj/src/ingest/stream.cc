#include "subevent/ingest/stream.h"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "subevent/errors.h"
#include "subevent/ingest/tokenizer.h"

namespace subevent::ingest {

std::size_t Annotation::num_bins() const {
  if (interval <= 0 || end <= start) return 0;
  return static_cast<std::size_t>((end - start + interval - 1) / interval);
}

std::size_t Bin::word_count() const {
  std::size_t n = 0;
  for (const auto &t : tweets) n += t.tokens.size();
  return n;
}

std::vector<std::size_t> StreamExample::TweetCounts() const {
  std::vector<std::size_t> counts;
  counts.reserve(bins.size());
  for (const auto &b : bins) counts.push_back(b.tweet_count());
  return counts;
}

BinAssignment AssignBins(std::span<const TweetRecord> tweets, std::int64_t stream_start,
                         std::int64_t stream_end, std::int64_t interval) {
  if (interval <= 0) throw ConfigError(fmt::format("bin interval must be > 0, got {}", interval));
  if (stream_end <= stream_start) {
    throw ConfigError(fmt::format("stream window [{}, {}) is empty", stream_start, stream_end));
  }
  std::vector<const TweetRecord *> order;
  order.reserve(tweets.size());
  for (const auto &t : tweets) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](const TweetRecord *a, const TweetRecord *b) {
    if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
    return a->id < b->id;
  });

  const auto n_bins =
      static_cast<std::size_t>((stream_end - stream_start + interval - 1) / interval);
  BinAssignment out;
  out.bins.resize(n_bins);
  for (const TweetRecord *t : order) {
    if (t->timestamp < stream_start || t->timestamp >= stream_end) {
      ++out.discarded;
      continue;
    }
    out.bins[static_cast<std::size_t>((t->timestamp - stream_start) / interval)].push_back(*t);
  }
  return out;
}

std::vector<int> AlignLabels(std::size_t n_bins, std::span<const SubEventSpan> spans,
                             const LabelScheme &scheme) {
  return evalkit::SpansToBio(n_bins, spans, scheme);
}

StreamExample BuildExample(const RawStream &raw, const Vocab &vocab, const LabelScheme &scheme,
                           std::size_t *discarded) {
  const Annotation &ann = raw.annotation;
  BinAssignment assignment = AssignBins(raw.tweets, ann.start, ann.end, ann.interval);
  if (discarded != nullptr) *discarded = assignment.discarded;

  StreamExample example;
  example.stream_id = ann.stream_id;
  example.bins.resize(assignment.bins.size());
  for (std::size_t i = 0; i < assignment.bins.size(); ++i) {
    Bin &bin = example.bins[i];
    bin.index = i;
    bin.start_time = ann.start + static_cast<std::int64_t>(i) * ann.interval;
    for (const auto &tweet : assignment.bins[i]) {
      const auto tokens = Tokenize(tweet.text);
      bin.tweets.push_back({vocab.Encode(tokens)});
    }
  }
  example.gold_labels = AlignLabels(example.bins.size(), ann.spans, scheme);
  example.spans = ann.spans;
  std::sort(example.spans.begin(), example.spans.end(),
            [](const SubEventSpan &a, const SubEventSpan &b) { return a.first_bin < b.first_bin; });
  return example;
}

Vocab BuildVocab(std::span<const RawStream> streams, int min_count) {
  std::vector<std::vector<std::string>> texts;
  for (const auto &s : streams) {
    for (const auto &t : s.tweets) texts.push_back(Tokenize(t.text));
  }
  return Vocab::Build(texts, min_count);
}

LabelScheme BuildLabelScheme(std::span<const RawStream> streams) {
  std::set<std::string> types;
  for (const auto &s : streams) {
    for (const auto &span : s.annotation.spans) types.insert(span.type);
  }
  return LabelScheme(std::vector<std::string>(types.begin(), types.end()));
}

}  // namespace subevent::ingest
