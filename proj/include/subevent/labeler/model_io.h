#pragma once

#include <filesystem>

#include <json.hpp>

#include "subevent/labeler/model.h"

// A saved model is a directory holding
//   model.slb   parameter checkpoint
//   model.json  {"config": {...}, "labels": [...], "vocab": [...]}
namespace subevent::labeler {

inline constexpr const char *kCheckpointFile = "model.slb";
inline constexpr const char *kSidecarFile = "model.json";

// Sets one ModelConfig field from a flat-config key. Returns false for keys
// that are not model settings; throws ConfigError on a badly typed value.
bool SetModelConfigField(ModelConfig &config, const std::string &key, const nlohmann::json &value);

// Flat object with every ModelConfig field.
nlohmann::ordered_json ModelConfigToJson(const ModelConfig &config);
// Missing keys keep their defaults; unknown keys are ConfigErrors.
ModelConfig ModelConfigFromJson(const nlohmann::json &json);

void SaveModel(const std::filesystem::path &dir, const Model &model);
// Throws ConfigError when the sidecar and the tensors disagree.
Model LoadModel(const std::filesystem::path &dir);

}  // namespace subevent::labeler
