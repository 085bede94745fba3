#pragma once

#include <cstdint>
#include <string>
#include <type_traits>

#include <fmt/format.h>
#include <json.hpp>

#include "subevent/errors.h"

namespace subevent {

// Typed read of a flat-config value. Integers must be JSON integers (and
// non-negative for unsigned targets); any mismatch is a ConfigError naming
// the key.
template <typename T>
T ConfigValue(const std::string &key, const nlohmann::json &value) {
  bool ok = false;
  if constexpr (std::is_same_v<T, bool>) {
    ok = value.is_boolean();
  } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
    ok = value.is_number_unsigned();
  } else if constexpr (std::is_integral_v<T>) {
    ok = value.is_number_integer();
  } else if constexpr (std::is_floating_point_v<T>) {
    ok = value.is_number();
  } else if constexpr (std::is_same_v<T, std::string>) {
    ok = value.is_string();
  }
  if (!ok) throw ConfigError(fmt::format("config key '{}' has an invalid value {}", key, value.dump()));
  return value.get<T>();
}

}  // namespace subevent
