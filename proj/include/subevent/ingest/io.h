#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "subevent/ingest/stream.h"

// On-disk formats.
//   <stream_id>.tweets.jsonl      one {"id": str, "ts": int, "text": str} per line
//   <stream_id>.annotation.json   {"stream_id", "start", "end", "interval",
//                                  "spans": [{"type", "first_bin", "last_bin"}]}
// A dataset directory holds any number of such pairs.
namespace subevent::ingest {

inline constexpr std::string_view kTweetsSuffix = ".tweets.jsonl";
inline constexpr std::string_view kAnnotationSuffix = ".annotation.json";

// Throws ParseError with `source` and the 1-based line number on bad input,
// including negative timestamps and texts that are empty after trimming.
std::vector<TweetRecord> ReadTweets(std::istream &in, const std::string &source);
void WriteTweets(std::ostream &out, std::span<const TweetRecord> tweets);

Annotation ParseAnnotation(const std::string &json_text, const std::string &source);
std::string SerializeAnnotation(const Annotation &annotation);

void SaveRawStream(const std::filesystem::path &dir, const RawStream &stream);
RawStream LoadRawStream(const std::filesystem::path &dir, const std::string &stream_id);
// All streams in `dir`, ordered by stream id.
std::vector<RawStream> LoadRawDataset(const std::filesystem::path &dir);

}  // namespace subevent::ingest
