#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace subevent::ingest {

// Token <-> id map. Ids 0..3 are reserved; everything else is assigned in
// order of decreasing training frequency, ties broken lexicographically.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kUrl = 2;
  static constexpr int kUser = 3;
  static constexpr int kNumReserved = 4;

  Vocab();

  // Tokens seen fewer than `min_count` times map to UNK.
  static Vocab Build(std::span<const std::vector<std::string>> tokenized_texts, int min_count);
  // Restores a vocabulary from its id-ordered token list (as written by
  // tokens()); the reserved entries must be present.
  static Vocab FromTokens(std::vector<std::string> tokens);

  int Lookup(std::string_view token) const;
  const std::string &Token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string> &tokens() const { return tokens_; }

  // Maps a token sequence to ids; an empty sequence becomes a single UNK.
  std::vector<int> Encode(std::span<const std::string> tokens) const;

 private:
  void Add(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace subevent::ingest
