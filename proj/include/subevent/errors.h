#pragma once

#include <stdexcept>

namespace subevent {

// Invalid run configuration or command-line usage.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file (tweets, annotations, sidecars).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gold spans that violate the tagging assumptions (overlap, out of range,
// unknown type).
class AnnotationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace subevent
