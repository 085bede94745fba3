#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "subevent/evalkit/burst.h"
#include "subevent/labeler/model.h"
#include "subevent/synth/generator.h"

namespace subevent::cli {

// Every setting of a run. The file form is one flat JSON object whose keys
// are the union of model, synth, split, baseline and path settings.
struct RunConfig {
  labeler::ModelConfig model;
  synth::SynthConfig synth;
  std::size_t n_train = 3;
  std::size_t n_dev = 7;  // the remaining streams are test streams
  evalkit::BurstConfig burst;
  std::string train_dir;
  std::string dev_dir;
  std::string test_dir;
  std::string out_dir;

  // Sets one key; throws ConfigError for unknown keys and bad values.
  void Set(const std::string &key, const nlohmann::json &value);
  // Applies "key=value"; the value is parsed as JSON when possible and taken
  // as a string otherwise.
  void SetFromString(const std::string &assignment);
  void Validate() const;

  // All keys with their effective values.
  nlohmann::ordered_json ToJson() const;
};

// Defaults, then the file (when non-empty), then `overrides` in order.
RunConfig LoadRunConfig(const std::filesystem::path &file, const std::vector<std::string> &overrides);

// Writes resolved_config.json into `dir`.
void WriteResolvedConfig(const std::filesystem::path &dir, const RunConfig &config);

inline constexpr const char *kResolvedConfigFile = "resolved_config.json";

}  // namespace subevent::cli
