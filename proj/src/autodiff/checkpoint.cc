#include "subevent/autodiff/checkpoint.h"

#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace subevent::ad {
namespace {

constexpr std::array<char, 4> kMagic = {'S', 'L', 'B', '1'};
// Guards against allocating absurd sizes from a corrupt header.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

template <typename T>
void WriteLe(std::ostream &out, T value) {
  std::array<char, sizeof(T)> bytes;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T ReadLe(std::istream &in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char *>(bytes.data()), bytes.size());
  if (!in) throw std::runtime_error("checkpoint: unexpected end of file");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace

void WriteCheckpoint(std::ostream &out, const ParameterSet &params) {
  out.write(kMagic.data(), kMagic.size());
  WriteLe<std::uint32_t>(out, kCheckpointVersion);
  WriteLe<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto &[name, tensor] : params) {
    WriteLe<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    WriteLe<std::uint32_t>(out, static_cast<std::uint32_t>(tensor.rank()));
    for (std::size_t d : tensor.shape()) WriteLe<std::uint64_t>(out, d);
    for (double v : tensor.values()) WriteLe<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

void SaveCheckpoint(const std::filesystem::path &path, const ParameterSet &params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
  WriteCheckpoint(out, params);
}

ParameterSet ReadCheckpoint(std::istream &in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("checkpoint: bad magic");
  const auto version = ReadLe<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw std::runtime_error(fmt::format("checkpoint: unsupported version {}", version));
  }
  const auto count = ReadLe<std::uint32_t>(in);
  ParameterSet params;
  for (std::uint32_t t = 0; t < count; ++t) {
    const auto name_len = ReadLe<std::uint32_t>(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (!in) throw std::runtime_error("checkpoint: truncated tensor name");
    const auto rank = ReadLe<std::uint32_t>(in);
    Shape shape;
    std::uint64_t elements = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      const auto d = ReadLe<std::uint64_t>(in);
      elements *= d;
      if (elements > kMaxElements) throw std::runtime_error("checkpoint: tensor too large");
      shape.push_back(static_cast<std::size_t>(d));
    }
    std::vector<double> values(static_cast<std::size_t>(elements));
    for (double &v : values) v = std::bit_cast<double>(ReadLe<std::uint64_t>(in));
    if (!params.emplace(name, Tensor(std::move(shape), std::move(values), true)).second) {
      throw std::runtime_error(fmt::format("checkpoint: duplicate tensor '{}'", name));
    }
  }
  return params;
}

ParameterSet LoadCheckpoint(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open checkpoint {}", path.string()));
  return ReadCheckpoint(in);
}

}  // namespace subevent::ad
