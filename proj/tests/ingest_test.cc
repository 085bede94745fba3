#include <algorithm>
#include <filesystem>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "subevent/errors.h"
#include "subevent/ingest/io.h"
#include "subevent/ingest/stream.h"
#include "subevent/ingest/tokenizer.h"
#include "subevent/ingest/vocab.h"

namespace subevent::ingest {
namespace {

using Tokens = std::vector<std::string>;

TEST(Tokenize, Examples) {
  EXPECT_EQ(Tokenize("GOAL!!! #WorldCup http://t.co/x"), (Tokens{"goal", "worldcup", "<url>"}));
  EXPECT_EQ(Tokenize(""), Tokens{});
  EXPECT_EQ(Tokenize("@ref Yellow card"), (Tokens{"<user>", "yellow", "card"}));
}

TEST(Tokenize, PunctuationSplitsAndDisappears) {
  EXPECT_EQ(Tokenize("half-time... 2:1, wow"), (Tokens{"half", "time", "2", "1", "wow"}));
  EXPECT_EQ(Tokenize("!!! ??"), Tokens{});
  EXPECT_EQ(Tokenize("https://example.org/a?b=c and www.x.com"), (Tokens{"<url>", "and", "<url>"}));
}

TEST(Tokenize, KeepsNonAsciiBytes) {
  EXPECT_EQ(Tokenize("Müller TOR"), (Tokens{"müller", "tor"}));
}

TweetRecord Tweet(std::string id, std::int64_t ts, std::string text = "hello") {
  return {std::move(id), ts, std::move(text)};
}

TEST(AssignBins, TwoTweetsTwoBins) {
  const std::int64_t t0 = 1000;
  const TweetRecord tweets[] = {Tweet("a", t0 + 5), Tweet("b", t0 + 61)};
  const BinAssignment bins = AssignBins(tweets, t0, t0 + 120, 60);
  ASSERT_EQ(bins.bins.size(), 2u);
  EXPECT_EQ(bins.bins[0].size(), 1u);
  EXPECT_EQ(bins.bins[1].size(), 1u);
  EXPECT_EQ(bins.discarded, 0u);
}

TEST(AssignBins, NinetyFiveMinuteWindow) {
  EXPECT_EQ(AssignBins({}, 0, 95 * 60, 60).bins.size(), 95u);
}

TEST(AssignBins, EmptyStreamKeepsEmptyBins) {
  const BinAssignment bins = AssignBins({}, 0, 180, 60);
  ASSERT_EQ(bins.bins.size(), 3u);
  for (const auto &bin : bins.bins) EXPECT_TRUE(bin.empty());
}

TEST(AssignBins, PartialLastBinRoundsUp) {
  EXPECT_EQ(AssignBins({}, 0, 121, 60).bins.size(), 3u);
}

TEST(AssignBins, DiscardsOutsideWindow) {
  const TweetRecord tweets[] = {Tweet("a", 99), Tweet("b", 100), Tweet("c", 219), Tweet("d", 220)};
  const BinAssignment bins = AssignBins(tweets, 100, 220, 60);
  EXPECT_EQ(bins.discarded, 2u);
  EXPECT_EQ(bins.bins[0][0].id, "b");
  EXPECT_EQ(bins.bins[1][0].id, "c");
}

TEST(AssignBins, RejectsBadWindow) {
  EXPECT_THROW(AssignBins({}, 0, 60, 0), ConfigError);
  EXPECT_THROW(AssignBins({}, 0, 60, -5), ConfigError);
  EXPECT_THROW(AssignBins({}, 60, 60, 60), ConfigError);
}

std::vector<TweetRecord> RandomTweets(std::mt19937_64 &gen, std::size_t n, std::int64_t lo,
                                      std::int64_t hi) {
  std::uniform_int_distribution<std::int64_t> ts(lo, hi);
  std::vector<TweetRecord> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(Tweet("t" + std::to_string(i), ts(gen)));
  return out;
}

TEST(AssignBins, PartitionAndOrderIndependence) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::int64_t start = 500, interval = 1 + static_cast<std::int64_t>(gen() % 90);
    const std::int64_t end = start + 1 + static_cast<std::int64_t>(gen() % 600);
    auto tweets = RandomTweets(gen, gen() % 60, start - 100, end + 100);
    const BinAssignment a = AssignBins(tweets, start, end, interval);

    std::size_t kept = 0;
    for (std::size_t b = 0; b < a.bins.size(); ++b) {
      kept += a.bins[b].size();
      for (const auto &t : a.bins[b]) {
        EXPECT_EQ(static_cast<std::size_t>((t.timestamp - start) / interval), b);
      }
      EXPECT_TRUE(std::is_sorted(a.bins[b].begin(), a.bins[b].end(), [](const auto &x, const auto &y) {
        return std::tie(x.timestamp, x.id) < std::tie(y.timestamp, y.id);
      }));
    }
    const auto inside = std::count_if(tweets.begin(), tweets.end(), [&](const TweetRecord &t) {
      return t.timestamp >= start && t.timestamp < end;
    });
    EXPECT_EQ(kept, static_cast<std::size_t>(inside));
    EXPECT_EQ(kept + a.discarded, tweets.size());

    std::shuffle(tweets.begin(), tweets.end(), gen);
    EXPECT_EQ(AssignBins(tweets, start, end, interval).bins, a.bins);
  }
}

RawStream SampleStream() {
  RawStream s;
  s.annotation = {"m1", 0, 240, 60, {{"goal", 1, 2}}};
  s.tweets = {Tweet("x1", 10, "Kick off #ready"), Tweet("x2", 70, "GOAL goal goal"),
              Tweet("x3", 75, "what a goal @striker"), Tweet("x4", 130, "unbelievable \"quote\"\tand\\slash"),
              Tweet("x5", 500, "after the window")};
  return s;
}

TEST(JsonLines, RoundTrip) {
  const RawStream s = SampleStream();
  std::stringstream buffer;
  WriteTweets(buffer, s.tweets);
  EXPECT_EQ(ReadTweets(buffer, "mem"), s.tweets);
  EXPECT_EQ(ParseAnnotation(SerializeAnnotation(s.annotation), "mem"), s.annotation);
}

TEST(JsonLines, DirectoryRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "subevent_ingest_roundtrip";
  std::filesystem::remove_all(dir);
  RawStream a = SampleStream(), b = SampleStream();
  b.annotation.stream_id = "m0";
  SaveRawStream(dir, a);
  SaveRawStream(dir, b);
  const auto loaded = LoadRawDataset(dir);
  ASSERT_EQ(loaded.size(), 2u);
  EXPECT_EQ(loaded[0], b);
  EXPECT_EQ(loaded[1], a);
  std::filesystem::remove_all(dir);
}

void ExpectParseErrorAt(const std::string &text, const std::string &where) {
  std::istringstream in(text);
  try {
    ReadTweets(in, "f.jsonl");
    FAIL() << "expected ParseError for " << text;
  } catch (const ParseError &e) {
    EXPECT_NE(std::string(e.what()).find(where), std::string::npos) << e.what();
  }
}

TEST(JsonLines, ParseErrorsNameTheLine) {
  const std::string good = R"({"id": "a", "ts": 1, "text": "ok"})" "\n";
  ExpectParseErrorAt(good + "{not json}\n", "f.jsonl:2");
  ExpectParseErrorAt(good + good + R"({"id": "a", "ts": -1, "text": "ok"})", "f.jsonl:3");
  ExpectParseErrorAt(R"({"id": "a", "ts": 1, "text": "   "})", "f.jsonl:1");
  ExpectParseErrorAt(R"({"id": "a", "text": "x"})", "f.jsonl:1");
  ExpectParseErrorAt(R"({"id": 3, "ts": 1, "text": "x"})", "f.jsonl:1");
}

TEST(JsonLines, BlankLinesAreSkipped) {
  std::istringstream in("\n" R"({"id": "a", "ts": 1, "text": "ok"})" "\n\n");
  EXPECT_EQ(ReadTweets(in, "f").size(), 1u);
}

TEST(Annotation, RejectsMalformed) {
  EXPECT_THROW(ParseAnnotation("{}", "a.json"), ParseError);
  EXPECT_THROW(ParseAnnotation(R"({"stream_id":"m","start":0,"end":60,"interval":60,"spans":[{"type":"g"}]})",
                               "a.json"),
               ParseError);
}

TEST(Vocab, ReservedIdsAndFrequencyOrder) {
  const std::vector<Tokens> texts = {{"b", "a", "a", "c"}, {"b", "a", "d", "c"}, {"rare"}};
  const Vocab vocab = Vocab::Build(texts, 2);
  EXPECT_EQ(vocab.Token(Vocab::kPad), "<pad>");
  EXPECT_EQ(vocab.Lookup("<url>"), Vocab::kUrl);
  EXPECT_EQ(vocab.Lookup("<user>"), Vocab::kUser);
  // a:3, then b and c tie at 2 and break lexicographically.
  EXPECT_EQ(vocab.Lookup("a"), 4);
  EXPECT_EQ(vocab.Lookup("b"), 5);
  EXPECT_EQ(vocab.Lookup("c"), 6);
  EXPECT_EQ(vocab.Lookup("d"), Vocab::kUnk);
  EXPECT_EQ(vocab.Lookup("rare"), Vocab::kUnk);
  EXPECT_EQ(vocab.Lookup("never"), Vocab::kUnk);
  EXPECT_EQ(vocab.size(), 7u);
  EXPECT_EQ(Vocab::FromTokens(vocab.tokens()).tokens(), vocab.tokens());
}

TEST(Vocab, EmptyTokenSequenceBecomesUnk) {
  const Vocab vocab;
  EXPECT_EQ(vocab.Encode(Tokens{}), std::vector<int>{Vocab::kUnk});
}

TEST(Vocab, BijectiveOverEntries) {
  const std::vector<Tokens> texts = {{"x", "y", "z", "x", "y", "z", "w"}};
  const Vocab vocab = Vocab::Build(texts, 1);
  for (int id = 0; id < static_cast<int>(vocab.size()); ++id) EXPECT_EQ(vocab.Lookup(vocab.Token(id)), id);
}

TEST(BuildExample, BinsTokensAndLabels) {
  const RawStream s = SampleStream();
  const RawStream streams[] = {s};
  const Vocab vocab = BuildVocab(streams, 1);
  const LabelScheme scheme = BuildLabelScheme(streams);
  std::size_t discarded = 0;
  const StreamExample ex = BuildExample(s, vocab, scheme, &discarded);
  EXPECT_EQ(discarded, 1u);
  ASSERT_EQ(ex.bins.size(), 4u);
  EXPECT_EQ(ex.TweetCounts(), (std::vector<std::size_t>{1, 2, 1, 0}));
  EXPECT_EQ(ex.bins[1].word_count(), 7u);
  EXPECT_EQ(ex.bins[1].tweets[1].tokens.back(), Vocab::kUser);
  EXPECT_EQ(ex.bins[3].start_time, 180);
  EXPECT_EQ(ex.gold_labels, (std::vector<int>{0, 1, 2, 0}));
  EXPECT_EQ(ex.stream_id, "m1");
}

TEST(BuildExample, IndependentOfInputOrder) {
  RawStream s = SampleStream();
  const RawStream streams[] = {s};
  const Vocab vocab = BuildVocab(streams, 1);
  const LabelScheme scheme = BuildLabelScheme(streams);
  const StreamExample a = BuildExample(s, vocab, scheme);
  std::reverse(s.tweets.begin(), s.tweets.end());
  const StreamExample b = BuildExample(s, vocab, scheme);
  ASSERT_EQ(a.bins.size(), b.bins.size());
  for (std::size_t i = 0; i < a.bins.size(); ++i) {
    ASSERT_EQ(a.bins[i].tweets.size(), b.bins[i].tweets.size());
    for (std::size_t j = 0; j < a.bins[i].tweets.size(); ++j) {
      EXPECT_EQ(a.bins[i].tweets[j].tokens, b.bins[i].tweets[j].tokens);
    }
  }
}

TEST(AlignLabels, OverlapNamesBothSpans) {
  const LabelScheme scheme({"card", "goal"});
  const SubEventSpan spans[] = {{"goal", 1, 3}, {"card", 3, 4}};
  try {
    AlignLabels(6, spans, scheme);
    FAIL();
  } catch (const AnnotationError &e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("goal"), std::string::npos) << msg;
    EXPECT_NE(msg.find("card"), std::string::npos) << msg;
  }
}

TEST(AlignLabels, RejectsOutOfRangeAndUnknownType) {
  const LabelScheme scheme({"goal"});
  const SubEventSpan past_end[] = {{"goal", 4, 6}};
  EXPECT_THROW(AlignLabels(6, past_end, scheme), AnnotationError);
  const SubEventSpan unknown[] = {{"penalty", 0, 0}};
  EXPECT_THROW(AlignLabels(6, unknown, scheme), AnnotationError);
}

}  // namespace
}  // namespace subevent::ingest
