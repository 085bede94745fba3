#include "subevent/ingest/tokenizer.h"

#include <cctype>

namespace subevent::ingest {
namespace {

bool IsSpace(unsigned char c) { return std::isspace(c) != 0; }

bool IsWordChar(unsigned char c) { return c >= 0x80 || std::isalnum(c) != 0 || c == '_'; }

bool StartsWithNoCase(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  }
  return true;
}

bool IsUrl(std::string_view chunk) {
  return StartsWithNoCase(chunk, "http://") || StartsWithNoCase(chunk, "https://") ||
         StartsWithNoCase(chunk, "www.");
}

void SplitChunk(std::string_view chunk, std::vector<std::string> &out) {
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back(std::move(word));
    word.clear();
  };
  for (std::size_t i = 0; i < chunk.size();) {
    const auto c = static_cast<unsigned char>(chunk[i]);
    if (c == '@' && word.empty() && i + 1 < chunk.size() &&
        IsWordChar(static_cast<unsigned char>(chunk[i + 1]))) {
      out.emplace_back(kUserToken);
      ++i;
      while (i < chunk.size() && IsWordChar(static_cast<unsigned char>(chunk[i]))) ++i;
      continue;
    }
    if (IsWordChar(c)) {
      word.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    } else {
      flush();
    }
    ++i;
  }
  flush();
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t begin = i;
    while (i < text.size() && !IsSpace(static_cast<unsigned char>(text[i]))) ++i;
    if (begin == i) break;
    const std::string_view chunk = text.substr(begin, i - begin);
    if (IsUrl(chunk)) {
      tokens.emplace_back(kUrlToken);
    } else {
      SplitChunk(chunk, tokens);
    }
  }
  return tokens;
}

}  // namespace subevent::ingest
