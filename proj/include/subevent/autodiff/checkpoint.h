#pragma once

#include <filesystem>
#include <istream>
#include <ostream>

#include "subevent/autodiff/parameters.h"

namespace subevent::ad {

// Binary parameter checkpoint, all integers little-endian:
//   "SLB1" | version u32 | tensor count u32
//   per tensor: name length u32 | UTF-8 name | rank u32 | dims u64[rank] |
//               values f64[prod(dims)]
// Tensors are written in ParameterSet (lexicographic) order, so equal
// parameter sets produce identical bytes.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void WriteCheckpoint(std::ostream &out, const ParameterSet &params);
void SaveCheckpoint(const std::filesystem::path &path, const ParameterSet &params);

// Loaded tensors have requires_grad = true; callers freeze what they need.
// Throws std::runtime_error on malformed input.
ParameterSet ReadCheckpoint(std::istream &in);
ParameterSet LoadCheckpoint(const std::filesystem::path &path);

}  // namespace subevent::ad
