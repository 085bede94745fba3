#include "subevent/ingest/io.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "subevent/errors.h"

namespace subevent::ingest {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

bool BlankAfterTrim(const std::string &s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

template <typename T>
T Field(const json &obj, const char *key, const std::string &where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(fmt::format("{}: missing field '{}'", where, key));
  if constexpr (std::is_same_v<T, std::string>) {
    if (!it->is_string()) throw ParseError(fmt::format("{}: '{}' must be a string", where, key));
  } else {
    if (!it->is_number_integer()) {
      throw ParseError(fmt::format("{}: '{}' must be an integer", where, key));
    }
  }
  return it->get<T>();
}

std::string ReadFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::vector<TweetRecord> ReadTweets(std::istream &in, const std::string &source) {
  std::vector<TweetRecord> tweets;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (BlankAfterTrim(line)) continue;
    const std::string where = fmt::format("{}:{}", source, line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error &e) {
      throw ParseError(fmt::format("{}: {}", where, e.what()));
    }
    if (!obj.is_object()) throw ParseError(where + ": expected a JSON object");
    TweetRecord t;
    t.id = Field<std::string>(obj, "id", where);
    t.timestamp = Field<std::int64_t>(obj, "ts", where);
    t.text = Field<std::string>(obj, "text", where);
    if (t.timestamp < 0) throw ParseError(fmt::format("{}: negative timestamp", where));
    if (BlankAfterTrim(t.text)) throw ParseError(fmt::format("{}: empty tweet text", where));
    tweets.push_back(std::move(t));
  }
  return tweets;
}

void WriteTweets(std::ostream &out, std::span<const TweetRecord> tweets) {
  for (const auto &t : tweets) {
    ordered_json obj;
    obj["id"] = t.id;
    obj["ts"] = t.timestamp;
    obj["text"] = t.text;
    out << obj.dump() << '\n';
  }
}

Annotation ParseAnnotation(const std::string &json_text, const std::string &source) {
  json obj;
  try {
    obj = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw ParseError(fmt::format("{}: {}", source, e.what()));
  }
  if (!obj.is_object()) throw ParseError(source + ": expected a JSON object");
  Annotation ann;
  ann.stream_id = Field<std::string>(obj, "stream_id", source);
  ann.start = Field<std::int64_t>(obj, "start", source);
  ann.end = Field<std::int64_t>(obj, "end", source);
  ann.interval = Field<std::int64_t>(obj, "interval", source);
  if (ann.interval <= 0) throw ConfigError(fmt::format("{}: interval must be > 0", source));
  if (ann.end <= ann.start) throw ParseError(fmt::format("{}: end must exceed start", source));
  auto spans = obj.find("spans");
  if (spans == obj.end() || !spans->is_array()) {
    throw ParseError(fmt::format("{}: 'spans' must be an array", source));
  }
  for (const auto &s : *spans) {
    if (!s.is_object()) throw ParseError(source + ": span must be an object");
    ann.spans.push_back({Field<std::string>(s, "type", source),
                         Field<int>(s, "first_bin", source), Field<int>(s, "last_bin", source)});
  }
  evalkit::ValidateSpans(ann.num_bins(), ann.spans);
  return ann;
}

std::string SerializeAnnotation(const Annotation &annotation) {
  ordered_json obj;
  obj["stream_id"] = annotation.stream_id;
  obj["start"] = annotation.start;
  obj["end"] = annotation.end;
  obj["interval"] = annotation.interval;
  obj["spans"] = ordered_json::array();
  for (const auto &s : annotation.spans) {
    ordered_json span;
    span["type"] = s.type;
    span["first_bin"] = s.first_bin;
    span["last_bin"] = s.last_bin;
    obj["spans"].push_back(std::move(span));
  }
  return obj.dump(2) + "\n";
}

void SaveRawStream(const fs::path &dir, const RawStream &stream) {
  fs::create_directories(dir);
  const std::string &id = stream.annotation.stream_id;
  {
    std::ofstream out(dir / (id + std::string(kTweetsSuffix)), std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError(fmt::format("cannot write tweets for {} in {}", id, dir.string()));
    WriteTweets(out, stream.tweets);
  }
  std::ofstream out(dir / (id + std::string(kAnnotationSuffix)), std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError(fmt::format("cannot write annotation for {} in {}", id, dir.string()));
  out << SerializeAnnotation(stream.annotation);
}

RawStream LoadRawStream(const fs::path &dir, const std::string &stream_id) {
  RawStream stream;
  const fs::path ann_path = dir / (stream_id + std::string(kAnnotationSuffix));
  stream.annotation = ParseAnnotation(ReadFile(ann_path), ann_path.string());
  if (stream.annotation.stream_id != stream_id) {
    throw ParseError(fmt::format("{}: stream_id '{}' does not match file name", ann_path.string(),
                                 stream.annotation.stream_id));
  }
  const fs::path tweets_path = dir / (stream_id + std::string(kTweetsSuffix));
  std::ifstream in(tweets_path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open {}", tweets_path.string()));
  stream.tweets = ReadTweets(in, tweets_path.string());
  return stream;
}

std::vector<RawStream> LoadRawDataset(const fs::path &dir) {
  if (!fs::is_directory(dir)) throw ParseError(fmt::format("not a directory: {}", dir.string()));
  std::vector<std::string> ids;
  for (const auto &entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > kAnnotationSuffix.size() && name.ends_with(kAnnotationSuffix)) {
      ids.push_back(name.substr(0, name.size() - kAnnotationSuffix.size()));
    }
  }
  std::sort(ids.begin(), ids.end());
  std::vector<RawStream> streams;
  for (const auto &id : ids) streams.push_back(LoadRawStream(dir, id));
  return streams;
}

}  // namespace subevent::ingest
