#include "subevent/ingest/vocab.h"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "subevent/errors.h"
#include "subevent/ingest/tokenizer.h"

namespace subevent::ingest {
namespace {

const std::vector<std::string> &ReservedTokens() {
  static const std::vector<std::string> reserved = {"<pad>", "<unk>", std::string(kUrlToken),
                                                    std::string(kUserToken)};
  return reserved;
}

}  // namespace

Vocab::Vocab() {
  for (const auto &t : ReservedTokens()) Add(t);
}

void Vocab::Add(std::string token) {
  const int id = static_cast<int>(tokens_.size());
  if (!ids_.emplace(token, id).second) {
    throw ParseError("vocabulary: duplicate token '" + token + "'");
  }
  tokens_.push_back(std::move(token));
}

Vocab Vocab::Build(std::span<const std::vector<std::string>> tokenized_texts, int min_count) {
  std::map<std::string, long> counts;
  for (const auto &text : tokenized_texts) {
    for (const auto &tok : text) ++counts[tok];
  }
  std::vector<std::pair<std::string, long>> kept;
  for (auto &[tok, n] : counts) {
    if (n < min_count) continue;
    if (std::find(ReservedTokens().begin(), ReservedTokens().end(), tok) != ReservedTokens().end()) {
      continue;
    }
    kept.emplace_back(tok, n);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto &a, const auto &b) { return a.second > b.second; });
  Vocab vocab;
  for (auto &[tok, n] : kept) vocab.Add(tok);
  return vocab;
}

Vocab Vocab::FromTokens(std::vector<std::string> tokens) {
  const auto &reserved = ReservedTokens();
  if (tokens.size() < reserved.size() ||
      !std::equal(reserved.begin(), reserved.end(), tokens.begin())) {
    throw ParseError("vocabulary: reserved tokens missing");
  }
  Vocab vocab;
  for (std::size_t i = reserved.size(); i < tokens.size(); ++i) vocab.Add(std::move(tokens[i]));
  return vocab;
}

int Vocab::Lookup(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

std::vector<int> Vocab::Encode(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(std::max<std::size_t>(tokens.size(), 1));
  for (const auto &t : tokens) ids.push_back(Lookup(t));
  if (ids.empty()) ids.push_back(kUnk);
  return ids;
}

}  // namespace subevent::ingest
