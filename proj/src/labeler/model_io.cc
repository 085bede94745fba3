#include "subevent/labeler/model_io.h"

#include <fstream>

#include <fmt/format.h>

#include "subevent/autodiff/checkpoint.h"
#include "subevent/config_value.h"
#include "subevent/errors.h"

namespace subevent::labeler {

using nlohmann::json;

bool SetModelConfigField(ModelConfig &c, const std::string &key, const json &v) {
  auto &e = c.encoder;
  if (key == "variant") e.variant = encoders::ParseVariant(ConfigValue<std::string>(key, v));
  else if (key == "tweet_lstm") e.tweet_lstm = ConfigValue<bool>(key, v);
  else if (key == "d_embed") e.d_embed = ConfigValue<std::size_t>(key, v);
  else if (key == "d_tweet_lstm") e.d_tweet_lstm = ConfigValue<std::size_t>(key, v);
  else if (key == "d_bin") e.d_bin = ConfigValue<std::size_t>(key, v);
  else if (key == "cnn_window") e.cnn_window = ConfigValue<std::size_t>(key, v);
  else if (key == "two_level_attention") e.two_level_attention = ConfigValue<bool>(key, v);
  else if (key == "chronological") c.chronological = ConfigValue<bool>(key, v);
  else if (key == "head") c.head = ParseHead(ConfigValue<std::string>(key, v));
  else if (key == "d_chrono") c.d_chrono = ConfigValue<std::size_t>(key, v);
  else if (key == "dropout") c.dropout = ConfigValue<double>(key, v);
  else if (key == "seed") c.seed = ConfigValue<std::uint64_t>(key, v);
  else if (key == "epochs") c.epochs = ConfigValue<int>(key, v);
  else if (key == "patience") c.patience = ConfigValue<int>(key, v);
  else if (key == "lr") c.adam.lr = ConfigValue<double>(key, v);
  else if (key == "beta1") c.adam.beta1 = ConfigValue<double>(key, v);
  else if (key == "beta2") c.adam.beta2 = ConfigValue<double>(key, v);
  else if (key == "eps") c.adam.eps = ConfigValue<double>(key, v);
  else if (key == "class_weighting") c.class_weighting = ConfigValue<bool>(key, v);
  else if (key == "vocab_min_count") c.vocab_min_count = ConfigValue<int>(key, v);
  else return false;
  return true;
}

nlohmann::ordered_json ModelConfigToJson(const ModelConfig &c) {
  nlohmann::ordered_json j;
  j["variant"] = encoders::ToString(c.encoder.variant);
  j["tweet_lstm"] = c.encoder.tweet_lstm;
  j["d_embed"] = c.encoder.d_embed;
  j["d_tweet_lstm"] = c.encoder.d_tweet_lstm;
  j["d_bin"] = c.encoder.d_bin;
  j["cnn_window"] = c.encoder.cnn_window;
  j["two_level_attention"] = c.encoder.two_level_attention;
  j["chronological"] = c.chronological;
  j["head"] = ToString(c.head);
  j["d_chrono"] = c.d_chrono;
  j["dropout"] = c.dropout;
  j["seed"] = c.seed;
  j["epochs"] = c.epochs;
  j["patience"] = c.patience;
  j["lr"] = c.adam.lr;
  j["beta1"] = c.adam.beta1;
  j["beta2"] = c.adam.beta2;
  j["eps"] = c.adam.eps;
  j["class_weighting"] = c.class_weighting;
  j["vocab_min_count"] = c.vocab_min_count;
  return j;
}

ModelConfig ModelConfigFromJson(const json &j) {
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  ModelConfig config;
  for (const auto &[key, value] : j.items()) {
    if (!SetModelConfigField(config, key, value)) {
      throw ConfigError(fmt::format("unknown model config key '{}'", key));
    }
  }
  return config;
}

void SaveModel(const std::filesystem::path &dir, const Model &model) {
  std::filesystem::create_directories(dir);
  ad::SaveCheckpoint(dir / kCheckpointFile, model.params);

  nlohmann::ordered_json sidecar;
  sidecar["config"] = ModelConfigToJson(model.config);
  sidecar["types"] = model.scheme.types();
  std::vector<std::string> labels;
  for (std::size_t id = 0; id < model.scheme.num_labels(); ++id) {
    labels.push_back(model.scheme.LabelName(static_cast<int>(id)));
  }
  sidecar["labels"] = labels;
  sidecar["vocab"] = model.vocab.tokens();
  std::ofstream out(dir / kSidecarFile, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", (dir / kSidecarFile).string()));
  out << sidecar.dump(2) << '\n';
}

Model LoadModel(const std::filesystem::path &dir) {
  const auto sidecar_path = dir / kSidecarFile;
  std::ifstream in(sidecar_path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read {}", sidecar_path.string()));
  json sidecar;
  try {
    sidecar = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ConfigError(fmt::format("{}: {}", sidecar_path.string(), e.what()));
  }
  for (const char *key : {"config", "types", "labels", "vocab"}) {
    if (!sidecar.contains(key)) {
      throw ConfigError(fmt::format("{}: missing '{}'", sidecar_path.string(), key));
    }
  }

  Model model;
  model.config = ModelConfigFromJson(sidecar["config"]);
  model.config.Validate();
  model.scheme = LabelScheme(sidecar["types"].get<std::vector<std::string>>());
  const auto labels = sidecar["labels"].get<std::vector<std::string>>();
  if (labels.size() != model.scheme.num_labels()) {
    throw ConfigError(fmt::format("{}: {} labels for {} types", sidecar_path.string(), labels.size(),
                                  model.scheme.num_types()));
  }
  for (std::size_t id = 0; id < labels.size(); ++id) {
    if (model.scheme.LabelName(static_cast<int>(id)) != labels[id]) {
      throw ConfigError(fmt::format("{}: label {} is '{}', expected '{}'", sidecar_path.string(), id,
                                    labels[id], model.scheme.LabelName(static_cast<int>(id))));
    }
  }
  model.vocab = ingest::Vocab::FromTokens(sidecar["vocab"].get<std::vector<std::string>>());
  model.params = ad::LoadCheckpoint(dir / kCheckpointFile);

  // Shapes follow from the config alone; rebuild a template and compare.
  encoders::TfIdfStats dummy;
  dummy.document_frequency.assign(model.vocab.size(), 0.0);
  const Model expected = InitModel(model.config, model.scheme, model.vocab, &dummy);
  if (expected.params.size() != model.params.size()) {
    throw ConfigError(fmt::format("checkpoint holds {} tensors, config expects {}",
                                  model.params.size(), expected.params.size()));
  }
  for (const auto &[name, tensor] : expected.params) {
    auto it = model.params.find(name);
    if (it == model.params.end()) throw ConfigError(fmt::format("checkpoint lacks tensor '{}'", name));
    if (it->second.shape() != tensor.shape()) {
      throw ConfigError(fmt::format("tensor '{}' has shape {}, config expects {}", name,
                                    ad::ShapeToString(it->second.shape()),
                                    ad::ShapeToString(tensor.shape())));
    }
    it->second.set_requires_grad(tensor.requires_grad());
  }
  return model;
}

}  // namespace subevent::labeler
