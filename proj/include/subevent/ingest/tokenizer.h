#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace subevent::ingest {

inline constexpr std::string_view kUrlToken = "<url>";
inline constexpr std::string_view kUserToken = "<user>";

// Tweet normalization: lowercase (ASCII), URLs -> "<url>", @mentions ->
// "<user>", '#' stripped from hashtags, split on whitespace and punctuation,
// punctuation dropped. Bytes >= 0x80 are kept as word characters so UTF-8
// text survives intact.
std::vector<std::string> Tokenize(std::string_view text);

}  // namespace subevent::ingest
